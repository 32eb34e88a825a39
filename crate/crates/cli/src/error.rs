use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] faultloc_core::Error),

    #[error("{path}: {reason}")]
    Input { path: String, reason: String },

    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },

    #[error("{0}")]
    Usage(String),

    #[error("localisation did not converge within the evaluation budget")]
    NotConverged,
}

impl CliError {
    pub fn input(path: &Path, reason: impl ToString) -> Self {
        CliError::Input {
            path: path.display().to_string(),
            reason: reason.to_string(),
        }
    }

    pub fn output(path: &Path, source: std::io::Error) -> Self {
        CliError::Output {
            path: path.display().to_string(),
            source,
        }
    }

    /// 2: bad input or validation, 3: solver divergence, 4: no convergence.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(faultloc_core::Error::Diverged { .. }) => 3,
            CliError::Core(_) | CliError::Input { .. } | CliError::Usage(_) => 2,
            CliError::NotConverged => 4,
            CliError::Output { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
