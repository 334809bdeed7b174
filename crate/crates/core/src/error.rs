use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MzvError {
    #[error("index {0} is not admissible (last entry must be at least 2)")]
    NonAdmissibleIndex(String),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("word {0} has no block decomposition (empty or starts with 0)")]
    NoBlockDecomposition(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("path passes through a singular point at {0}")]
    PathThroughSingularity(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("requested precision not reached: wanted 1e-{wanted}, achieved {achieved:.3e}")]
    PrecisionNotReached { wanted: u32, achieved: f64 },
    #[error("coefficient of {0} diverges at a regularized endpoint")]
    NonAdmissibleCoefficient(String),
    #[error("degree caps differ: {0} vs {1}")]
    CapMismatch(usize, usize),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, MzvError>;
