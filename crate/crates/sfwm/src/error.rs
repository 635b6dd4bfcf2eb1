use std::path::PathBuf;

use crate::config::ConfigError;

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const VALIDATION: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Model(#[from] sfwm_core::Error),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("manifest: {0}")]
    Manifest(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) | CliError::Manifest(_) => exit::CONFIG,
            CliError::Model(e) if e.is_numerical() => exit::NUMERICAL,
            CliError::Model(_) => exit::CONFIG,
            CliError::Validation(_) => exit::VALIDATION,
            CliError::Io { .. } => exit::IO,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
