use clutter_core::ClutterError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ClutterError),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 1 for I/O, 2 for invalid input or parameters, 3 for broken internal
    /// invariants.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_io() => 1,
            CliError::Io(_) => 1,
            CliError::Core(_) | CliError::Usage(_) | CliError::Json(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}
