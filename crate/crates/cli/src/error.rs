use std::path::PathBuf;

use thiserror::Error;

/// Exit code for invalid input or parameters.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit code for unreadable inputs or unwritable outputs.
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] synthbh::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Core(_) => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, err: csv::Error) -> Self {
        let path = path.into();
        if err.is_io_error() {
            match err.into_kind() {
                csv::ErrorKind::Io(source) => return CliError::Io { path, source },
                _ => unreachable!("is_io_error implies an Io kind"),
            }
        }
        CliError::Validation(format!("{}: {err}", path.display()))
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
