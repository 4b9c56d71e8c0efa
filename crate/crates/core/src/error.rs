use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient samples: need at least {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },

    #[error("invalid variance at coordinate {index}: {value}")]
    InvalidVariance { index: usize, value: f64 },

    #[error("finite-difference oracle failed: non-finite loss at coordinate {index}")]
    OracleFailure { index: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("divergence at step {step}: non-finite loss")]
    Divergence { step: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error on line {line}: expected {expected} columns, found {found}")]
    Schema {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("config error for key `{key}` (line {line}): {message}")]
    Config {
        key: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
