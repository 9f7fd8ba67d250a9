use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {dim}: at least 2 is required")]
    InvalidDimension { dim: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("vector is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("vectors {i} and {j} are not orthonormal (|<v_i|v_j>| deviates by {deviation:e})")]
    NotOrthonormal { i: usize, j: usize, deviation: f64 },

    #[error("noise variant does not belong to protocol {protocol}")]
    NoiseMismatch { protocol: &'static str },

    #[error("shared vector set is empty")]
    EmptyVectorSet,

    #[error("no transcripts to average")]
    EmptyTranscripts,

    #[error("phi grid is empty or contains values outside [0, pi/2]")]
    InvalidPhiGrid,

    #[error("trial count must be positive")]
    ZeroTrials,

    #[error("Bob never produced outcome {outcome} in {trials} trials; cannot form the conditional probability")]
    NoConditioningEvents { outcome: usize, trials: u64 },

    #[error("Bob's outcome did not match the input state within {cap} noise realizations")]
    RealizationCapExceeded { cap: u64 },

    #[error("protocol {protocol} requires dimension {required}, got {actual}")]
    UnsupportedDimension {
        protocol: &'static str,
        required: usize,
        actual: usize,
    },
}
