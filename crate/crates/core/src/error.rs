use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while reading or validating input data.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: line {line}: field `{field}`: {message}")]
    Field { path: String, line: usize, field: String, message: String },
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("document `{id}`: {message}")]
    Document { id: String, message: String },
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl DataError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DataError::Io { path: path.into(), source }
    }
}

/// Errors raised while training, persisting, or applying a model.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training diverged: non-finite loss at epoch {epoch}, step {step}")]
    Diverged { epoch: usize, step: usize },
    #[error("class `{0}` has no training documents")]
    EmptyClass(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unsupported model format version {found} (this build reads version {supported})")]
    Version { found: u32, supported: u32 },
    #[error("model file is truncated or incomplete: {0}")]
    Truncated(String),
    #[error("model checksum mismatch: header says {expected}, payload hashes to {actual}")]
    Checksum { expected: String, actual: String },
    #[error("malformed model file: {0}")]
    Malformed(String),
    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Data(#[from] DataError),
}

pub type DataResult<T> = Result<T, DataError>;
pub type ModelResult<T> = Result<T, ModelError>;
