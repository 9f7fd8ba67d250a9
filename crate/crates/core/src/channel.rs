//! Turns an entanglement protocol into a one-way simulation of sending a
//! state: Bob measures a basis whose first vector is the input and discards
//! shared noise realizations until his outcome is that vector, then tells
//! Alice how many realizations to skip.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::{substream, CHUNK_TRIALS};
use crate::hilbert::{complete_basis, OrthonormalBasis, StateVector};
use crate::protocols::EntanglementProtocol;

/// Default bound on noise realizations per call.
pub const DEFAULT_REALIZATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelTranscript {
    /// Alice's outcome (zero-based).
    pub outcome: usize,
    /// Noise realizations discarded before Bob's outcome matched.
    pub skips: u64,
    pub protocol_bits: u32,
    /// `protocol_bits + log2(skips + 1)`.
    pub total_bits_estimate: f64,
}

impl ChannelTranscript {
    pub fn realizations(&self) -> u64 {
        self.skips + 1
    }
}

/// Simulates sending `input` to Alice, who measures `ma`.
pub fn simulate_channel<P: EntanglementProtocol, R: Rng + ?Sized>(
    protocol: &P,
    input: &StateVector,
    ma: &OrthonormalBasis,
    rng: &mut R,
) -> Result<ChannelTranscript> {
    simulate_channel_with_cap(protocol, input, ma, rng, DEFAULT_REALIZATION_CAP)
}

pub fn simulate_channel_with_cap<P: EntanglementProtocol, R: Rng + ?Sized>(
    protocol: &P,
    input: &StateVector,
    ma: &OrthonormalBasis,
    rng: &mut R,
    cap: u64,
) -> Result<ChannelTranscript> {
    let dim = protocol.dim();
    for actual in [input.dim(), ma.dim()] {
        if actual != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual,
            });
        }
    }
    let mb = complete_basis(input, rng)?;
    for skips in 0..cap {
        let noise = protocol.sample_noise(rng);
        let bob = protocol.bob(&mb, &noise)?;
        if bob.outcome == 0 {
            let outcome = protocol.alice(ma, &noise, bob.message)?;
            let protocol_bits = protocol.bits_sent();
            return Ok(ChannelTranscript {
                outcome,
                skips,
                protocol_bits,
                total_bits_estimate: f64::from(protocol_bits) + ((skips + 1) as f64).log2(),
            });
        }
    }
    Err(Error::RealizationCapExceeded { cap })
}

/// `calls` independent channel uses, seeded per chunk like the harness.
pub fn run_channel<P: EntanglementProtocol>(
    protocol: &P,
    input: &StateVector,
    ma: &OrthonormalBasis,
    calls: u64,
    seed: u64,
) -> Result<Vec<ChannelTranscript>> {
    run_channel_with_cap(protocol, input, ma, calls, seed, DEFAULT_REALIZATION_CAP)
}

pub fn run_channel_with_cap<P: EntanglementProtocol>(
    protocol: &P,
    input: &StateVector,
    ma: &OrthonormalBasis,
    calls: u64,
    seed: u64,
    cap: u64,
) -> Result<Vec<ChannelTranscript>> {
    if calls == 0 {
        return Err(Error::ZeroTrials);
    }
    let chunks = calls.div_ceil(CHUNK_TRIALS);
    let per_chunk = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = CHUNK_TRIALS.min(calls - c * CHUNK_TRIALS);
            let mut rng = substream(seed, c);
            (0..n)
                .map(|_| simulate_channel_with_cap(protocol, input, ma, &mut rng, cap))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_chunk.into_iter().flatten().collect())
}

/// Mean noise realizations consumed per call.
pub fn mean_realizations(transcripts: &[ChannelTranscript]) -> Result<f64> {
    if transcripts.is_empty() {
        return Err(Error::EmptyTranscripts);
    }
    let total: u64 = transcripts
        .iter()
        .map(ChannelTranscript::realizations)
        .sum();
    Ok(total as f64 / transcripts.len() as f64)
}

/// Average extra communication for the skip count, `log2` of the mean
/// number of realizations consumed.
pub fn average_extra_bits(transcripts: &[ChannelTranscript]) -> Result<f64> {
    Ok(mean_realizations(transcripts)?.log2())
}

/// Relative frequency of each of Alice's outcomes.
pub fn outcome_frequencies(transcripts: &[ChannelTranscript], dim: usize) -> Vec<f64> {
    let mut counts = vec![0u64; dim];
    for t in transcripts {
        counts[t.outcome] += 1;
    }
    let n = transcripts.len().max(1) as f64;
    counts.into_iter().map(|c| c as f64 / n).collect()
}
