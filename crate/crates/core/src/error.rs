use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("cannot open {path}: {source}")]
    Open {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },

    #[error("line {line}: probability out of range: {field} = {value}")]
    ProbabilityOutOfRange {
        line: usize,
        field: String,
        value: f64,
    },

    #[error("invalid record {id:?}: {message}")]
    InvalidRecord { id: String, message: String },

    #[error("invalid JSON document: {0}")]
    Json(#[from] serde_json::Error),

    #[error("unknown statistical channel {0:?}")]
    UnknownChannel(String),

    #[error("channel {0:?} is a plug-in slot with no registered implementation")]
    PluginNotRegistered(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate calibration class: {0}")]
    DegenerateClasses(String),

    #[error("labels required: document {0:?} has no label")]
    LabelsRequired(String),

    #[error("language confidence out of range: {0}")]
    ConfidenceOutOfRange(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("threshold table has no UNKNOWN entry for channel {0:?}")]
    MissingUnknownEntry(String),

    #[error("threshold table does not match configuration: {0}")]
    TableMismatch(String),

    #[error("prediction/gold mismatch: {0}")]
    IdMismatch(String),

    #[error("invalid confusable map: {0}")]
    ConfusableMap(String),
}

impl Error {
    /// Process exit code for this error: 1 for I/O, 2 for domain errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Open { .. } => 1,
            _ => 2,
        }
    }
}
