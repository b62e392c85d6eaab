use std::path::PathBuf;

use thiserror::Error;

use crate::issue::ValidationIssue;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: malformed JSON: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: top-level schema must have \"type\": \"object\"")]
    NotObjectRoot { path: String },

    #[error("{path}: top-level \"description\" (the event name) is missing or empty")]
    MissingEventName { path: String },

    #[error("unsupported schema structure at {pointer}: {reason}")]
    UnsupportedStructure { pointer: String, reason: String },

    #[error("duplicate column header {header:?}")]
    DuplicateHeader { header: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("template manifest does not match template.csv: {reason}")]
    ManifestMismatch { reason: String },

    #[error("invalid producer details: {reason}")]
    InvalidProducer { reason: String },

    #[error("rows carry {} unresolved validation issue(s)", issues.len())]
    PreconditionViolation { issues: Vec<ValidationIssue> },

    #[error("input must be a JSON array of events")]
    InputNotArray,
}

impl Error {
    /// Stable machine-readable code for reports and exit-code mapping.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "PARSE_ERROR",
            Error::NotObjectRoot { .. } => "NOT_OBJECT_ROOT",
            Error::MissingEventName { .. } => "MISSING_EVENT_NAME",
            Error::UnsupportedStructure { .. } => "UNSUPPORTED_STRUCTURE",
            Error::DuplicateHeader { .. } => "DUPLICATE_HEADER",
            Error::Io { .. } => "IO_ERROR",
            Error::Csv { .. } => "CSV_ERROR",
            Error::ManifestMismatch { .. } => "MANIFEST_MISMATCH",
            Error::InvalidProducer { .. } => "INVALID_PRODUCER",
            Error::PreconditionViolation { .. } => "PRECONDITION_VIOLATION",
            Error::InputNotArray => "INPUT_NOT_ARRAY",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
