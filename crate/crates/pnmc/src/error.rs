use std::path::PathBuf;

use thiserror::Error;

/// Failures of the command-line layer.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] pnmc_core::Error),
    #[error("{what} = {measured:e} exceeds {tol:e}")]
    Tolerance { what: &'static str, measured: f64, tol: f64 },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Format { path: path.into(), message: message.into() }
    }

    /// 1 configuration or validation, 2 numerical failure, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io { .. } | CliError::Format { .. } => 3,
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::Core(_) => 1,
            CliError::Tolerance { .. } => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Config(_) => "Config",
            CliError::Io { .. } => "Io",
            CliError::Format { .. } => "Format",
            CliError::Core(e) => e.name(),
            CliError::Tolerance { .. } => "ToleranceExceeded",
        }
    }

    pub fn module(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.module(),
            CliError::Tolerance { .. } => "cli",
            CliError::Config(_) => "cli",
            CliError::Io { .. } | CliError::Format { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
