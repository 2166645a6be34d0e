use thiserror::Error;

/// Errors surfaced by the CLI and the IO layer.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Core(#[from] clusmat_core::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl AppError {
    /// Process exit code: 2 for shape mismatches, 3 for parse errors,
    /// 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(clusmat_core::Error::DimensionMismatch { .. }) => 2,
            AppError::Parse(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, AppError>;
