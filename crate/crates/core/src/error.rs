use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("non-finite input to {0}")]
    NonFiniteInput(&'static str),
    #[error("{0}")]
    InvalidArgument(&'static str),
    #[error("matrix not positive definite after maximum jitter")]
    NotPositiveDefinite,
    #[error("input outside the box domain")]
    OutOfDomain,
    #[error("invalid fidelity for this model: {0}")]
    InvalidFidelity(&'static str),
    #[error("not enough data: {0}")]
    NotEnoughData(&'static str),
    #[error("evaluation callback failed: {0}")]
    Evaluation(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv parse error: {0}")]
    CsvParse(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
