use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_FILE: i32 = 66;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Graph { path: PathBuf, source: mdag::Error },

    #[error(transparent)]
    Domain(#[from] mdag::Error),

    #[error("{}: {message}", path.display())]
    Sidecar { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::File { .. } => EXIT_FILE,
            CliError::Graph { .. } | CliError::Domain(_) | CliError::Sidecar { .. } => EXIT_DOMAIN,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
