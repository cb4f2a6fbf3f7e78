use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("branch weight p must lie strictly between 0 and 1, got {0}")]
    InvalidWeight(f64),

    #[error("word of length {len} does not fit a frame of depth {depth}")]
    WordTooLong { len: usize, depth: usize },

    #[error("{what}: depth {depth} exceeds the supported maximum {max}")]
    DepthLimit {
        what: &'static str,
        depth: usize,
        max: usize,
    },

    #[error("matrix dimension {dim} exceeds the supported maximum {max}")]
    DimensionLimit { dim: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NonConvergence { sweeps: usize, off: f64 },

    #[error("z = {z} is not certifiably outside the spectrum (need z > {limit})")]
    ResolventDomain { z: f64, limit: f64 },

    #[error("secular function does not change sign on [{lo}, {hi}]; raise the truncation depth")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("series orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("Schatten exponent must be at least 1, got {0}")]
    SchattenExponent(f64),

    #[error("invalid value: {0}")]
    Invalid(String),
}
