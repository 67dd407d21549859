use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    #[error("signal too short: {len} samples, need at least {required}")]
    TooShort { len: usize, required: usize },

    #[error("t = {t} s lies within one step ({step} s) of the domain boundary [{start}, {end}]")]
    Boundary {
        t: f64,
        step: f64,
        start: f64,
        end: f64,
    },

    #[error("radial distance to the electrode is zero at t = {t} s")]
    Singularity { t: f64 },

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("stream error: {0}")]
    Stream(String),

    #[error("feature importance undefined: the forest contains no split")]
    UndefinedImportance,

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("i/o error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {}: {message}", path.display())]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Format {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// True for errors caused by bad inputs (as opposed to the environment).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}
