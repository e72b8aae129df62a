use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad user input; exit code 2.
    #[error("{0}")]
    Validation(String),
    /// A check or write that should not fail; exit code 1.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn invalid(e: impl std::fmt::Display) -> Self {
        CliError::Validation(e.to_string())
    }

    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Internal(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}
