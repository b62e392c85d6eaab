//! Located validation issues shared by cell coercion and schema validation.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    TypeMismatch,
    FormatInvalid,
    EnumViolation,
    RequiredMissing,
    UnknownColumn,
    MissingColumn,
    DuplicateHeader,
    RequiredMissingField,
    SchemaTypeMismatch,
    SchemaEnumViolation,
    SchemaFormatInvalid,
}

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::TypeMismatch => "TYPE_MISMATCH",
            IssueCode::FormatInvalid => "FORMAT_INVALID",
            IssueCode::EnumViolation => "ENUM_VIOLATION",
            IssueCode::RequiredMissing => "REQUIRED_MISSING",
            IssueCode::UnknownColumn => "UNKNOWN_COLUMN",
            IssueCode::MissingColumn => "MISSING_COLUMN",
            IssueCode::DuplicateHeader => "DUPLICATE_HEADER",
            IssueCode::RequiredMissingField => "REQUIRED_MISSING_FIELD",
            IssueCode::SchemaTypeMismatch => "SCHEMA_TYPE_MISMATCH",
            IssueCode::SchemaEnumViolation => "SCHEMA_ENUM_VIOLATION",
            IssueCode::SchemaFormatInvalid => "SCHEMA_FORMAT_INVALID",
        }
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where an issue was found: a spreadsheet cell, a whole column, or a
/// JSON Pointer into an event array.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Location {
    /// `row` is 1-based and counts data rows after the header row.
    Cell {
        row: usize,
        header: String,
    },
    Column {
        header: String,
    },
    Pointer(String),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Cell { row, header } => write!(f, "row {row}, {header}"),
            Location::Column { header } => write!(f, "column {header}"),
            Location::Pointer(p) if p.is_empty() => f.write_str("(root)"),
            Location::Pointer(p) => f.write_str(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValidationIssue {
    pub code: IssueCode,
    pub location: Location,
    pub message: String,
}

impl ValidationIssue {
    pub fn cell(code: IssueCode, row: usize, header: &str, message: impl Into<String>) -> Self {
        ValidationIssue {
            code,
            location: Location::Cell {
                row,
                header: header.to_owned(),
            },
            message: message.into(),
        }
    }

    pub fn column(code: IssueCode, header: &str, message: impl Into<String>) -> Self {
        ValidationIssue {
            code,
            location: Location::Column {
                header: header.to_owned(),
            },
            message: message.into(),
        }
    }

    pub fn pointer(
        code: IssueCode,
        pointer: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        ValidationIssue {
            code,
            location: Location::Pointer(pointer.into()),
            message: message.into(),
        }
    }

    pub fn json_pointer(&self) -> Option<&str> {
        match &self.location {
            Location::Pointer(p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.location, self.code, self.message)
    }
}

/// Wire form used in validation reports: `{"pointer","code","message"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointerIssue {
    pub pointer: String,
    pub code: IssueCode,
    pub message: String,
}
