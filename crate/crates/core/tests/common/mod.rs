#![allow(dead_code)]

/// Asymptotic Kolmogorov-Smirnov critical coefficient at the 1% level.
pub const KS_1PCT: f64 = 1.628;

/// One-sample KS statistic of `samples` against the continuous `cdf`.
pub fn ks_one_sample(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn ks_one_sample_passes(samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> bool {
    let n = samples.len() as f64;
    ks_one_sample(samples, cdf) < KS_1PCT / n.sqrt()
}

/// Two-sample KS statistic.
pub fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

pub fn ks_two_sample_passes(a: Vec<f64>, b: Vec<f64>) -> bool {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    ks_two_sample(a, b) < KS_1PCT * ((na + nb) / (na * nb)).sqrt()
}

/// Sample mean and its standard error.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Whether `count / trials` is within `k` binomial standard errors of `p`.
pub fn within_sigma(count: u64, trials: u64, p: f64, k: f64) -> bool {
    let est = count as f64 / trials as f64;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    (est - p).abs() <= k * sigma
}
