use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid parameter `{name}`: {reason}")]
    Param { name: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },

    /// A numerical contract was checked and did not hold.
    #[error("{0}")]
    Contract(String),

    #[error(transparent)]
    Engine(#[from] xconv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Param { .. } | CliError::Engine(_) => 2,
            CliError::Io { .. } | CliError::Format { .. } => 3,
            CliError::Contract(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn param(name: &str, reason: impl Into<String>) -> CliError {
    CliError::Param {
        name: name.to_string(),
        reason: reason.into(),
    }
}

pub fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn format_err(path: &Path, reason: impl Into<String>) -> CliError {
    CliError::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}
