use std::io;
use std::path::Path;

use thiserror::Error;

/// A failed run, classified by process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    NonFinite(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::NonFinite(_) => 3,
        }
    }

    pub fn io(path: &Path, err: io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl From<polvar_core::Error> for CliError {
    fn from(err: polvar_core::Error) -> Self {
        match err {
            polvar_core::Error::NonFinite(_) => CliError::NonFinite(err.to_string()),
            _ => CliError::Validation(err.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Fails with [`CliError::NonFinite`] unless every value is finite.
pub fn ensure_finite<'a>(what: &str, values: impl IntoIterator<Item = &'a f64>) -> CliResult<()> {
    if values.into_iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CliError::NonFinite(format!("non-finite value in {what}")))
    }
}
