use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] reacdiff_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Process exit status.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    /// Finished, but some grid points could not be computed.
    pub const WARNINGS: i32 = 3;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use reacdiff_core::Error as E;
        match self {
            CliError::Usage(_)
            | CliError::Core(E::Usage(_) | E::Parse(_) | E::Spec(_))
            | CliError::Json(_) => exit::USAGE,
            _ => exit::FAILURE,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
