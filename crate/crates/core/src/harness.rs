//! Monte Carlo estimation of outcome statistics, phi sweeps over the
//! one-parameter family, and maximum-discrepancy curves.
//!
//! Trials are split into fixed-size chunks; chunk `c` draws from ChaCha
//! stream `c` of the run seed, and only integer counts are reduced. Results
//! are therefore identical for any number of worker threads.

use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::OrthonormalBasis;
use crate::oracle::{measurement_family, quantum_conditional};
use crate::protocols::{EntanglementProtocol, Protocol, ProtocolKind};

/// Trials per random substream.
pub const CHUNK_TRIALS: u64 = 1 << 13;

/// Random stream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes `tag` into `seed` (SplitMix64 finalizer) for independent sub-runs.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed
        ^ tag
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn chunks(trials: u64) -> impl ParallelIterator<Item = (u64, u64)> {
    let n = trials.div_ceil(CHUNK_TRIALS);
    (0..n).into_par_iter().map(move |c| {
        let start = c * CHUNK_TRIALS;
        (c, CHUNK_TRIALS.min(trials - start))
    })
}

fn add_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

/// Binomial standard error `sqrt(p (1 - p) / n)`.
pub fn binomial_stderr(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

/// Outcome counts of repeated rounds, `counts[a][b]` row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimatedJoint {
    dim: usize,
    trials: u64,
    counts: Vec<u64>,
}

impl EstimatedJoint {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn count(&self, a: usize, b: usize) -> u64 {
        self.counts[a * self.dim + b]
    }

    pub fn estimate(&self, a: usize, b: usize) -> f64 {
        self.count(a, b) as f64 / self.trials as f64
    }

    pub fn stderr(&self, a: usize, b: usize) -> f64 {
        binomial_stderr(self.estimate(a, b), self.trials)
    }

    pub fn alice_counts(&self) -> Vec<u64> {
        self.counts
            .chunks_exact(self.dim)
            .map(|r| r.iter().sum())
            .collect()
    }

    pub fn bob_counts(&self) -> Vec<u64> {
        (0..self.dim)
            .map(|b| (0..self.dim).map(|a| self.count(a, b)).sum())
            .collect()
    }

    pub fn estimates(&self) -> Vec<Vec<f64>> {
        self.matrix(|a, b| self.estimate(a, b))
    }

    pub fn stderrs(&self) -> Vec<Vec<f64>> {
        self.matrix(|a, b| self.stderr(a, b))
    }

    pub fn counts(&self) -> Vec<Vec<u64>> {
        self.matrix(|a, b| self.count(a, b))
    }

    fn matrix<T>(&self, f: impl Fn(usize, usize) -> T) -> Vec<Vec<T>> {
        (0..self.dim)
            .map(|a| (0..self.dim).map(|b| f(a, b)).collect())
            .collect()
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// Runs `trials` rounds with fresh noise each and tallies the joint outcomes.
pub fn estimate_joint<P: EntanglementProtocol>(
    protocol: &P,
    ma: &OrthonormalBasis,
    mb: &OrthonormalBasis,
    trials: u64,
    seed: u64,
) -> Result<EstimatedJoint> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let dim = protocol.dim();
    check_dim(dim, ma.dim())?;
    check_dim(dim, mb.dim())?;
    let counts = chunks(trials)
        .map(|(c, n)| {
            let mut rng = substream(seed, c);
            let mut counts = vec![0u64; dim * dim];
            for _ in 0..n {
                let noise = protocol.sample_noise(&mut rng);
                let r = protocol.round(ma, mb, &noise)?;
                counts[r.a * dim + r.b] += 1;
            }
            Ok(counts)
        })
        .try_reduce(|| vec![0u64; dim * dim], |a, b| Ok(add_counts(a, b)))?;
    Ok(EstimatedJoint {
        dim,
        trials,
        counts,
    })
}

/// `points` equally spaced angles on `[0, pi/2]`, endpoints included.
pub fn phi_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| {
                if i + 1 == points {
                    FRAC_PI_2
                } else {
                    FRAC_PI_2 * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

/// One point of a sweep: the estimated `P(a = 1 | b = 1)` against `cos^2(phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub phi: f64,
    pub p_model: f64,
    pub stderr: f64,
    pub p_quantum: f64,
    pub discrepancy: f64,
}

impl SweepPoint {
    pub fn new(phi: f64, p_model: f64, stderr: f64) -> Self {
        let p_quantum = quantum_conditional(phi);
        Self {
            phi,
            p_model,
            stderr,
            p_quantum,
            discrepancy: (p_model - p_quantum).abs(),
        }
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    let in_range = |phi: &f64| (0.0..=FRAC_PI_2).contains(phi);
    if grid.is_empty() || !grid.iter().all(in_range) {
        Err(Error::InvalidPhiGrid)
    } else {
        Ok(())
    }
}

/// Estimates `P(a = 1 | b = 1)` at every angle of `grid`, with Alice's
/// measurement drawn from the one-parameter family around `mb`.
///
/// Each trial's noise realization and Bob's turn are shared by all grid
/// points; Alice's rule runs once per angle whenever Bob reports outcome 1.
/// Each point is thus an estimate over the same `trials` rounds.
pub fn sweep_phi<P: EntanglementProtocol>(
    protocol: &P,
    mb: &OrthonormalBasis,
    grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    validate_grid(grid)?;
    check_dim(protocol.dim(), mb.dim())?;
    let alices = grid
        .iter()
        .map(|&phi| measurement_family(mb, phi))
        .collect::<Result<Vec<_>>>()?;
    // Slot 0 counts conditioning events; slot 1 + i counts a = 1 at grid[i].
    let width = grid.len() + 1;
    let tally = chunks(trials)
        .map(|(c, n)| {
            let mut rng = substream(seed, c);
            let mut tally = vec![0u64; width];
            for _ in 0..n {
                let noise = protocol.sample_noise(&mut rng);
                let bob = protocol.bob(mb, &noise)?;
                if bob.outcome != 0 {
                    continue;
                }
                tally[0] += 1;
                for (slot, ma) in tally[1..].iter_mut().zip(&alices) {
                    if protocol.alice(ma, &noise, bob.message)? == 0 {
                        *slot += 1;
                    }
                }
            }
            Ok(tally)
        })
        .try_reduce(|| vec![0u64; width], |a, b| Ok(add_counts(a, b)))?;
    let events = tally[0];
    if events == 0 {
        return Err(Error::NoConditioningEvents { outcome: 0, trials });
    }
    Ok(grid
        .iter()
        .zip(&tally[1..])
        .map(|(&phi, &hits)| {
            let p = hits as f64 / events as f64;
            SweepPoint::new(phi, p, binomial_stderr(p, events))
        })
        .collect())
}

/// Largest discrepancy of a sweep, with the point where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub dim: usize,
    pub protocol: ProtocolKind,
    pub max_discrepancy: f64,
    /// Standard error of the estimate at the maximizing angle.
    pub stderr: f64,
    pub phi_at_max: f64,
}

pub fn max_discrepancy(points: &[SweepPoint]) -> Option<&SweepPoint> {
    points
        .iter()
        .fold(None, |best: Option<&SweepPoint>, p| match best {
            Some(b) if b.discrepancy >= p.discrepancy => Some(b),
            _ => Some(p),
        })
}

/// Sweep seed for dimension `dim` of a curve run with `seed`.
pub fn curve_seed(seed: u64, dim: usize) -> u64 {
    derive_seed(seed, dim as u64)
}

/// For each dimension in `dims`, the maximum over `grid` of the sweep
/// discrepancy, using Bob's computational basis.
pub fn max_discrepancy_curve(
    kind: ProtocolKind,
    dims: &[usize],
    grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    dims.iter()
        .map(|&dim| {
            let protocol = Protocol::new(kind, dim)?;
            let mb = OrthonormalBasis::computational(dim)?;
            let sweep = sweep_phi(&protocol, &mb, grid, trials, curve_seed(seed, dim))?;
            let worst = max_discrepancy(&sweep).ok_or(Error::InvalidPhiGrid)?;
            Ok(CurvePoint {
                dim,
                protocol: kind,
                max_discrepancy: worst.discrepancy,
                stderr: worst.stderr,
                phi_at_max: worst.phi,
            })
        })
        .collect()
}
