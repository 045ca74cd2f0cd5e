use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EbqError {
    #[error("non-convergent series: {0}")]
    NonConvergent(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid index pattern: {0}")]
    InvalidIndexPattern(String),
    #[error("charge mismatch: {0}")]
    ChargeMismatch(String),
}

impl EbqError {
    /// Stable CLI exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            EbqError::NonConvergent(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, EbqError>;
