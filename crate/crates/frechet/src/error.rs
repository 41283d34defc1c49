use thiserror::Error;

/// Errors produced by curve construction and the distance algorithms.
#[derive(Debug, Error)]
pub enum FrechetError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("curve must contain at least one point")]
    EmptyCurve,
    #[error("non-finite coordinate at point {0}")]
    NonFiniteCoordinate(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("bound {delta} is not realized by any monotone matching")]
    BoundNotRealized { delta: f64 },
    #[error("query delta {got} does not match the delta {expected} this index was built for")]
    IndexDeltaMismatch { expected: f64, got: f64 },
    #[error("instance size {size} exceeds the oracle cap {cap}")]
    SizeCapExceeded { size: usize, cap: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, FrechetError>;
