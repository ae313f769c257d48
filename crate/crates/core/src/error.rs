use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the analysis, simulation and ingestion paths can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("undeclared label `{label}` at layer {layer}")]
    Lookup { label: String, layer: u8 },

    #[error("range error: {0}")]
    Range(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("stream error: expected step {expected}, got {got}")]
    Stream { expected: usize, got: usize },

    #[error("metric error: {0}")]
    Metric(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("feature error: {0}")]
    Feature(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("step {index}: {source}")]
    Step {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sequence error at line {line}: expected u = {expected}, got {got}")]
    Sequence { line: usize, expected: usize, got: usize },

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }

    /// Process exit code used by the command-line front end.
    ///
    /// Input problems map to 2, metric problems to 3.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Metric(_) => 3,
            Error::Step { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
