mod common;

use ebitsim_core::channel::{
    average_extra_bits, mean_realizations, outcome_frequencies, run_channel, ChannelTranscript,
};
use ebitsim_core::harness::substream;
use ebitsim_core::hilbert::{
    complete_basis, sample_haar_basis, sample_haar_vector, NORM_TOLERANCE,
};
use ebitsim_core::oracle::born_conditional;
use ebitsim_core::{Error, OrthonormalBasis, Protocol, ProtocolKind, StateVector};
use proptest::prelude::*;
use rand::Rng;

fn realizations(t: &[ChannelTranscript]) -> Vec<u64> {
    t.iter().map(ChannelTranscript::realizations).collect()
}

#[test]
fn wrapped_qubit_model_reproduces_born_statistics() {
    let mut rng = substream(500, 0);
    let calls = 200_000;
    for kind in [ProtocolKind::Alt, ProtocolKind::TonerBacon] {
        let p = Protocol::new(kind, 2).unwrap();
        let input = sample_haar_vector(2, &mut rng).unwrap();
        let ma = sample_haar_basis(2, &mut rng).unwrap();
        let t = run_channel(&p, &input, &ma, calls, 501).unwrap();
        let freq = outcome_frequencies(&t, 2);
        let born = born_conditional(&ma, &input).unwrap();
        for (f, q) in freq.iter().zip(&born) {
            let sigma = (q * (1.0 - q) / calls as f64).sqrt();
            assert!((f - q).abs() <= 3.0 * sigma, "{kind}: {f} vs {q}");
        }
    }
}

/// Geometric law with success probability 1/N, sampled directly.
#[test]
fn mean_skips_match_direct_geometric_oracle() {
    let dim = 4;
    let calls = 100_000u64;
    let p = Protocol::new(ProtocolKind::P2a, dim).unwrap();
    let input = StateVector::basis(dim, 0).unwrap();
    let ma = OrthonormalBasis::computational(dim).unwrap();
    let t = run_channel(&p, &input, &ma, calls, 502).unwrap();
    let skips: Vec<f64> = t.iter().map(|t| t.skips as f64).collect();
    let mut rng = substream(503, 0);
    let oracle: Vec<f64> = (0..calls)
        .map(|_| {
            let mut k = 0u64;
            while rng.random_range(0..dim) != 0 {
                k += 1;
            }
            k as f64
        })
        .collect();
    let (m, se) = common::mean_se(&skips);
    let (mo, seo) = common::mean_se(&oracle);
    assert!((m - 3.0).abs() <= 3.0 * se, "{m}");
    assert!((m - mo).abs() <= 3.0 * (se * se + seo * seo).sqrt());
    assert!(common::ks_two_sample_passes(skips, oracle));
}

#[test]
fn realizations_are_geometric() {
    let dim = 4;
    let calls = 100_000u64;
    let p = Protocol::new(ProtocolKind::P1, dim).unwrap();
    let mut rng = substream(504, 0);
    let input = sample_haar_vector(dim, &mut rng).unwrap();
    let ma = sample_haar_basis(dim, &mut rng).unwrap();
    let t = run_channel(&p, &input, &ma, calls, 505).unwrap();
    // Bins k = 1..15 and a tail k >= 16: 15 degrees of freedom.
    let bins = 16usize;
    let mut observed = vec![0u64; bins];
    for r in realizations(&t) {
        observed[(r as usize).min(bins) - 1] += 1;
    }
    let q = 1.0 / dim as f64;
    let chi2: f64 = (0..bins)
        .map(|i| {
            let prob = if i + 1 < bins {
                q * (1.0 - q).powi(i as i32)
            } else {
                (1.0 - q).powi(i as i32)
            };
            let expected = prob * calls as f64;
            (observed[i] as f64 - expected).powi(2) / expected
        })
        .sum();
    assert!(chi2 < 30.578, "chi2 = {chi2}");
}

#[test]
fn extra_bits_equal_log_dimension() {
    for (kind, dim, expected) in [(ProtocolKind::P1, 2, 1.0), (ProtocolKind::P2a, 8, 3.0)] {
        let p = Protocol::new(kind, dim).unwrap();
        let input = StateVector::basis(dim, 1).unwrap();
        let ma = OrthonormalBasis::computational(dim).unwrap();
        let t = run_channel(&p, &input, &ma, 100_000, 506).unwrap();
        let bits = average_extra_bits(&t).unwrap();
        assert!((bits - expected).abs() <= 0.05, "N={dim}: {bits}");
        assert!((mean_realizations(&t).unwrap() / dim as f64 - 1.0).abs() <= 0.05);
        assert!(t.iter().all(|t| t.protocol_bits == expected as u32));
    }
}

#[test]
fn p2b_channel_is_accurate_in_three_dimensions() {
    let p = Protocol::new(ProtocolKind::P2b, 3).unwrap();
    let input = StateVector::basis(3, 0).unwrap();
    let ma = OrthonormalBasis::computational(3).unwrap();
    let t = run_channel(&p, &input, &ma, 100_000, 507).unwrap();
    let freq = outcome_frequencies(&t, 3);
    assert!(freq[0] >= 0.99, "{freq:?}");
}

#[test]
fn degenerate_transcripts() {
    assert!(matches!(
        average_extra_bits(&[]),
        Err(Error::EmptyTranscripts)
    ));
    let t = ChannelTranscript {
        outcome: 0,
        skips: 0,
        protocol_bits: 2,
        total_bits_estimate: 2.0,
    };
    assert_eq!(average_extra_bits(&[t; 10]).unwrap(), 0.0);
}

proptest! {
    #[test]
    fn completion_keeps_the_input(seed in any::<u64>(), dim in 2usize..12) {
        let mut rng = substream(seed, 0);
        let input = sample_haar_vector(dim, &mut rng).unwrap();
        let mb = complete_basis(&input, &mut rng).unwrap();
        prop_assert_eq!(mb.vector(0), &input);
        for i in 0..dim {
            for j in 0..dim {
                let ip = mb.vector(i).inner(mb.vector(j)).unwrap();
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((ip.re - target).abs() <= NORM_TOLERANCE && ip.im.abs() <= NORM_TOLERANCE);
            }
        }
    }
}
