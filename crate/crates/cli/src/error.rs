use std::path::{Path, PathBuf};

use fif::FifError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Numeric(#[from] FifError),
}

impl CliError {
    /// Process exit status: 1 usage, 2 input/output and parsing, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Parse { .. } => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn parse(path: &Path, message: impl Into<String>) -> Self {
        CliError::Parse { path: path.to_path_buf(), message: message.into() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
