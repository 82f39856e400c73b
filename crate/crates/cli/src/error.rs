use std::path::PathBuf;

use thiserror::Error;

/// Failure modes of the command-line tool, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("scenario {scenario:?}: {message}")]
    Invariant { scenario: String, message: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Parse { .. } => 2,
            CliError::Invariant { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn invariant(scenario: &str, message: impl std::fmt::Display) -> Self {
        CliError::Invariant {
            scenario: scenario.to_owned(),
            message: message.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
