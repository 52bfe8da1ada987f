use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("label column not found: `{0}`")]
    LabelColumnNotFound(String),

    #[error("column not found: `{0}`")]
    ColumnNotFound(String),

    #[error("ragged row {row}: expected {expected} cells, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("label column must hold exactly 2 classes, found {found}: {classes:?}")]
    ClassCount { found: usize, classes: Vec<String> },

    #[error("label `{0}` is neither the positive nor the negative class")]
    UnknownClass(String),

    #[error("column `{0}` is numeric; discretize it or declare it nominal")]
    NumericColumn(String),

    #[error("column `{column}`, row {row}: `{value}` is not numeric")]
    NotNumeric {
        column: String,
        row: usize,
        value: String,
    },

    #[error("dimension mismatch: expected width {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("illegal flip: {0}")]
    IllegalFlip(String),

    #[error("data is missing columns required by the model: {0:?}")]
    SchemaMismatch(Vec<String>),

    #[error("trace batch index {got} must be greater than {last}")]
    NonMonotoneTrace { last: usize, got: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid model file: {0}")]
    Model(String),

    #[error("invalid rule-set document, line {line}: {message}")]
    Dnf { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by bad input or arguments rather than by the
    /// environment (I/O failures).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}
