//! Command-line front end for the `qsera` search library.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use qsera::QseraError;

/// Failure classes with stable process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed input: bad file, bad JSON, bad flag value. Exit code 2.
    #[error("input error: {0}")]
    Input(String),
    /// Well-formed input that violates a model invariant or limit. Exit code 3.
    #[error("validation error: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Invalid(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<QseraError> for CliError {
    fn from(e: QseraError) -> Self {
        match e {
            QseraError::Parse(_) | QseraError::InputDomain(_) => CliError::Input(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
