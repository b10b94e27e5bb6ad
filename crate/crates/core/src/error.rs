use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PcdError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The asymptotic variance vanishes, so no normal approximation exists.
    #[error("degenerate distribution: {0}")]
    Degenerate(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("worker pool: {0}")]
    WorkerPool(String),
}

pub type Result<T, E = PcdError> = std::result::Result<T, E>;
