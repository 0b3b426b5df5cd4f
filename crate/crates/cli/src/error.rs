use thiserror::Error;

use crate::config::ConfigError;

/// Process exit statuses.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] fracwave::Error),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// Checks ran but at least one failed; the names are listed.
    #[error("failed: {}", .0.join("; "))]
    Failed(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use fracwave::Error as E;
        match self {
            CliError::Config(_) | CliError::Usage(_) | CliError::Io { .. } => EXIT_CONFIG,
            CliError::Failed(_) => EXIT_FAILED,
            CliError::Core(e) => match e {
                E::BlowUp { .. } => EXIT_BLOWUP,
                E::Uncertified(_) | E::Quadrature { .. } => EXIT_FAILED,
                _ => EXIT_CONFIG,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
