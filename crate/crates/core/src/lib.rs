//! Schema-driven conversion of spreadsheet-style event data into JSON.
//!
//! The pipeline has three stages:
//!
//! 1. [`schema_model::load_schema`] reads an event schema and
//!    [`flattener`] derives the data-entry columns and a row template
//!    from it. [`template_io`] writes the pair to disk as a CSV header
//!    row plus a JSON manifest.
//! 2. [`tabular_ingest`] binds a filled CSV to the columns by header
//!    name and coerces every cell, collecting located issues.
//! 3. [`json_generator`] fills one copy of the row template per data
//!    row, and [`schema_validator`] checks the resulting event array
//!    against the schema.
//!
//! [`bench`] times the three stages over synthetic inputs.

pub mod bench;
pub mod error;
pub mod flattener;
pub mod formats;
pub mod issue;
pub mod json_generator;
pub mod pointer;
pub mod schema_model;
pub mod schema_validator;
pub mod tabular_ingest;
pub mod template_io;

pub use error::{Error, Result};
pub use flattener::{get_keys, merge_properties, ColumnSpec, DataType, RowTemplate};
pub use issue::{IssueCode, Location, ValidationIssue};
pub use json_generator::{parse_to_json, serialize, EventArray, ProducerInfo};
pub use schema_model::{load_schema, NodeKind, Primitive, PropertyNode, SchemaDocument};
pub use schema_validator::{validate_events, ValidationReport};
pub use tabular_ingest::{bind_columns, read_sheet, validate_cells, CellValue, RowValues};
pub use template_io::{read_bundle, write_bundle, TemplateBundle};
