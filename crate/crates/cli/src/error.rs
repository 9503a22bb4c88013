use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigError;

/// Process exit codes. Stable contract.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const NUMERICAL: i32 = 2;
    pub const IO: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] dimer_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => exit::USAGE,
            CliError::Core(e) if e.is_numerical() => exit::NUMERICAL,
            CliError::Core(_) => exit::USAGE,
            CliError::Io { .. } => exit::IO,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
