use std::path::PathBuf;

use hebm_core::HebmError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: HebmError,
    },

    #[error("invalid experiment config: {0}")]
    Config(String),

    #[error("cannot parse {path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown fixture table {0:?}")]
    MissingFixture(String),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

impl ExperimentError {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentError::Core { .. } => "core",
            ExperimentError::Config(_) => "config",
            ExperimentError::Parse { .. } => "parse",
            ExperimentError::Io { .. } => "io",
            ExperimentError::MissingFixture(_) => "missing-fixture",
        }
    }

    /// Machine-readable form printed on failure.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Wire<'a> {
            error: &'a str,
            message: String,
        }
        serde_json::to_value(Wire {
            error: self.kind(),
            message: self.to_string(),
        })
        .expect("plain struct serializes")
    }
}

/// Attaches experiment context to core errors.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T>;
}

impl<T> Context<T> for std::result::Result<T, HebmError> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|source| ExperimentError::Core {
            context: what(),
            source,
        })
    }
}

pub(crate) fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> ExperimentError {
    let path = path.into();
    move |source| ExperimentError::Io { path, source }
}
