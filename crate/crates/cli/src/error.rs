use std::path::PathBuf;

use thiserror::Error;

/// Everything that can stop a run, split by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {field}: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("could not read config {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("could not parse config {path}: {message}")]
    ParseConfig { path: PathBuf, message: String },
    #[error("could not write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Numerical {
        context: &'static str,
        #[source]
        source: rabi_core::Error,
    },
}

impl CliError {
    pub fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        CliError::Invalid {
            field,
            message: message.into(),
        }
    }

    /// 1 for bad input (including unwritable output paths), 2 when the
    /// numerics fail on valid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical { .. } => 2,
            _ => 1,
        }
    }
}

/// Sorts a core error raised while validating `field` into the right bucket.
pub(crate) fn classify(field: &'static str, err: rabi_core::Error) -> CliError {
    use rabi_core::Error as E;
    match err {
        E::ComplexCubicRoots { .. }
        | E::NoConvergence { .. }
        | E::DegenerateSpectrum { .. }
        | E::UnitarityLoss { .. } => CliError::Numerical {
            context: field,
            source: err,
        },
        other => CliError::invalid(field, other.to_string()),
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
