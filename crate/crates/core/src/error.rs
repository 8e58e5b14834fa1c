use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero vector is not allowed here")]
    ZeroVector,
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("norm variant is not supported by this operation")]
    UnsupportedNorm,
    #[error("semi-norm variant is not supported by this operation")]
    UnsupportedSeminorm,
    #[error("semi-norm vanishes at a nonzero point; the operation requires p(u) > 0")]
    DegenerateSeminorm,
    #[error("induced operator semi-norm is zero; the operation requires P(T) > 0")]
    DegenerateOperator,
    #[error("iteration failed to converge")]
    NonConvergence,
    #[error("sample contains no points")]
    EmptySample,
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("dimension {0} is not supported by this operation")]
    UnsupportedDim(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
