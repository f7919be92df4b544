use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("conductance undefined: one side of the cut has zero volume")]
    UndefinedConductance,

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("size limit exceeded: {what} is {actual}, limit {limit}")]
    SizeLimit {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error is caused by bad user input rather than an internal failure.
    ///
    /// The CLI maps these to exit code 1 and everything else to exit code 2.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::InvalidInput(_)
            | Error::NodeOutOfRange { .. }
            | Error::SizeLimit { .. }
            | Error::InsufficientData(_)
            | Error::Parse { .. }
            | Error::Json(_)
            | Error::UndefinedConductance
            | Error::UndefinedMetric(_) => true,
            Error::Io { source, .. } => source.kind() == std::io::ErrorKind::NotFound,
            Error::Csv(_) => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
