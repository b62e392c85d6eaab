//! Row-template substitution: each data row becomes one event object.
//!
//! For every row the skeleton is copied, each header placeholder is
//! replaced by that row's typed cell, absent leaves are dropped along with
//! any object left empty, and the envelope keys `eventName` and `producer`
//! are appended.

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::flattener::{ColumnSpec, RowTemplate};
use crate::formats::is_email;
use crate::issue::ValidationIssue;
use crate::tabular_ingest::{bind_columns, validate_cells, RawSheet, RowValues};

pub const EVENT_NAME_KEY: &str = "eventName";
pub const PRODUCER_KEY: &str = "producer";

/// Producer details attached to every event. Blank fields are omitted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProducerInfo {
    pub full_name: Option<String>,
    pub email: Option<String>,
    pub address: Option<String>,
    pub phone: Option<String>,
    /// Property identification code.
    pub pic: Option<String>,
}

impl ProducerInfo {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(text.trim_start_matches('\u{feff}')).map_err(|source| Error::Parse {
            path: path.display().to_string(),
            source,
        })
    }

    /// Trims every field, drops blank ones and checks the email format.
    pub fn normalized(self) -> Result<Self> {
        fn clean(v: Option<String>) -> Option<String> {
            v.map(|s| s.trim().to_owned()).filter(|s| !s.is_empty())
        }
        let p = ProducerInfo {
            full_name: clean(self.full_name),
            email: clean(self.email),
            address: clean(self.address),
            phone: clean(self.phone),
            pic: clean(self.pic),
        };
        if let Some(email) = &p.email {
            if !is_email(email) {
                return Err(Error::InvalidProducer {
                    reason: format!("{email:?} is not a valid email address"),
                });
            }
        }
        Ok(p)
    }

    /// Envelope object, or `None` when no field is populated.
    pub fn to_json(&self) -> Option<Value> {
        let fields = [
            ("name", &self.full_name),
            ("email", &self.email),
            ("address", &self.address),
            ("phone", &self.phone),
            ("pic", &self.pic),
        ];
        let map: Map<String, Value> = fields
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_owned(), Value::String(v.clone()))))
            .collect();
        (!map.is_empty()).then_some(Value::Object(map))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventArray {
    pub event_name: String,
    pub events: Vec<Value>,
}

/// Fills the row template once per row.
///
/// `issues` are the cell issues reported for `rows`; any issue means the
/// rows are not fit for conversion.
pub fn parse_to_json(
    rows: &[RowValues],
    issues: &[ValidationIssue],
    cols: &[ColumnSpec],
    template: &RowTemplate,
    producer: &ProducerInfo,
    event_name: &str,
) -> Result<EventArray> {
    if !issues.is_empty() {
        return Err(Error::PreconditionViolation {
            issues: issues.to_vec(),
        });
    }
    let by_header: HashMap<&str, usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| (c.header.as_str(), i))
        .collect();
    let producer = producer.to_json();

    let events = rows
        .iter()
        .map(|row| {
            let mut event = match fill(&template.skeleton, row, &by_header) {
                Some(Value::Object(map)) => map,
                _ => Map::new(),
            };
            event.insert(
                EVENT_NAME_KEY.to_owned(),
                Value::String(event_name.to_owned()),
            );
            if let Some(p) = &producer {
                event.insert(PRODUCER_KEY.to_owned(), p.clone());
            }
            Value::Object(event)
        })
        .collect();
    Ok(EventArray {
        event_name: event_name.to_owned(),
        events,
    })
}

fn fill(node: &Value, row: &RowValues, by_header: &HashMap<&str, usize>) -> Option<Value> {
    match node {
        Value::Object(children) => {
            let map: Map<String, Value> = children
                .iter()
                .filter_map(|(k, v)| fill(v, row, by_header).map(|v| (k.clone(), v)))
                .collect();
            (!map.is_empty()).then_some(Value::Object(map))
        }
        Value::String(placeholder) => {
            let idx = by_header.get(placeholder.as_str())?;
            row.values.get(*idx).and_then(|v| v.to_json())
        }
        _ => None,
    }
}

/// Canonical JSON text: template key order, then `eventName`, then
/// `producer`. `pretty` indents by two spaces.
pub fn serialize(events: &EventArray, pretty: bool) -> String {
    let result = if pretty {
        serde_json::to_string_pretty(&events.events)
    } else {
        serde_json::to_string(&events.events)
    };
    result.expect("JSON values always serialize")
}

/// Result of a successful sheet conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct Conversion {
    pub events: EventArray,
    /// Non-fatal binding findings (unknown columns).
    pub warnings: Vec<ValidationIssue>,
}

/// Binds, coerces and converts a whole sheet. Any binding or cell issue
/// aborts the conversion; all of them are returned.
pub fn convert_sheet(
    sheet: &RawSheet,
    cols: &[ColumnSpec],
    template: &RowTemplate,
    producer: &ProducerInfo,
    event_name: &str,
) -> std::result::Result<Conversion, Vec<ValidationIssue>> {
    let binding = bind_columns(&sheet.headers, cols)?;
    let (rows, issues) = validate_cells(sheet, &binding, cols);
    if !issues.is_empty() {
        return Err(issues);
    }
    let events = parse_to_json(&rows, &issues, cols, template, producer, event_name)
        .expect("no issues were reported");
    Ok(Conversion {
        events,
        warnings: binding.warnings,
    })
}
