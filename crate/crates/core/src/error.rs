use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("unknown preset `{0}` (see `presets list`)")]
    UnknownPreset(String),

    #[error("`{0}` is not a sweepable parameter")]
    NotSweepable(String),

    #[error("variance explained must satisfy |r2| < 1, got {0}")]
    Calibration(f64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{0}")]
    Runtime(String),

    #[error("run {run_index} (master seed {master_seed}) panicked: {message}")]
    RunPanicked {
        run_index: u64,
        master_seed: u64,
        message: String,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a failure while running.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation { .. }
                | Error::UnknownKey(_)
                | Error::UnknownPreset(_)
                | Error::NotSweepable(_)
                | Error::Calibration(_)
                | Error::Json { .. }
        )
    }
}
