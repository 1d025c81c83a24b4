use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Core(#[from] qdos_core::Error),

    #[error("{0}")]
    Size(String),

    #[error("residual {residual:.3e} exceeds bound {bound:.3e}")]
    Residual { residual: f64, bound: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Parse(_) | CliError::Core(_) => 2,
            CliError::Residual { .. } => 3,
            CliError::Size(_) => 4,
        }
    }
}
