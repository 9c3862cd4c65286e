//! Error type shared across the crate.

use std::path::PathBuf;

/// Errors produced by dataset construction, evaluation, optimization and I/O.
#[derive(Debug, thiserror::Error)]
pub enum QcError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("invalid parameter {name}: {constraint}")]
    InvalidParam {
        name: &'static str,
        constraint: String,
    },

    #[error("empty input: {context}")]
    EmptyInput { context: &'static str },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("all points coincide; the data has no spread to work with")]
    DegenerateDistances,

    #[error("query lies outside the numeric support of the wave function")]
    OutOfSupport,

    #[error("non-finite {what} encountered during minimization at {at:?}")]
    NonFiniteEvaluation { what: &'static str, at: Vec<f64> },

    #[error("{path}: row {row}, column {col}: cannot parse {value:?} as a number")]
    ParseCell {
        path: PathBuf,
        row: usize,
        col: usize,
        value: String,
    },

    #[error("{path}: row {row} has {got} fields, expected {expected}")]
    InconsistentWidth {
        path: PathBuf,
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("report serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl QcError {
    pub(crate) fn invalid(name: &'static str, constraint: impl Into<String>) -> Self {
        QcError::InvalidParam {
            name,
            constraint: constraint.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        QcError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, QcError>;
