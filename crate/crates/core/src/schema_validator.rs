//! Event-array validation against a [`SchemaDocument`].
//!
//! Checks required presence, types, enum membership and the supported
//! string formats. Keys not declared by the schema, including the
//! `eventName`/`producer` envelope, are accepted.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::issue::{IssueCode, PointerIssue, ValidationIssue};
use crate::pointer;
use crate::schema_model::{NodeKind, Primitive, PropertyNode, SchemaDocument};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    /// Ordered by event index, then schema document order.
    pub issues: Vec<ValidationIssue>,
}

#[derive(Serialize)]
struct WireReport {
    valid: bool,
    issues: Vec<PointerIssue>,
}

impl ValidationReport {
    pub fn to_json(&self) -> Value {
        let wire = WireReport {
            valid: self.valid,
            issues: self
                .issues
                .iter()
                .map(|i| PointerIssue {
                    pointer: i.json_pointer().unwrap_or_default().to_owned(),
                    code: i.code,
                    message: i.message.clone(),
                })
                .collect(),
        };
        serde_json::to_value(wire).expect("report serialization is infallible")
    }
}

pub fn validate_events(events: &Value, doc: &SchemaDocument) -> Result<ValidationReport> {
    let items = events.as_array().ok_or(Error::InputNotArray)?;
    let mut issues = Vec::new();
    for (i, event) in items.iter().enumerate() {
        let ptr = pointer::push_index("", i);
        match event {
            Value::Object(map) => check_object(map, &doc.root, &ptr, &mut issues),
            other => issues.push(ValidationIssue::pointer(
                IssueCode::SchemaTypeMismatch,
                ptr,
                format!("event must be an object, found {}", json_type(other)),
            )),
        }
    }
    Ok(ValidationReport {
        valid: issues.is_empty(),
        issues,
    })
}

fn check_object(
    map: &Map<String, Value>,
    node: &PropertyNode,
    ptr: &str,
    out: &mut Vec<ValidationIssue>,
) {
    for child in &node.children {
        let child_ptr = pointer::push(ptr, &child.name);
        match map.get(&child.name) {
            Some(value) => check_value(value, child, &child_ptr, out),
            None if child.required => out.push(ValidationIssue::pointer(
                IssueCode::RequiredMissingField,
                child_ptr,
                format!("required property {:?} is missing", child.name),
            )),
            None => {}
        }
    }
}

fn check_value(value: &Value, node: &PropertyNode, ptr: &str, out: &mut Vec<ValidationIssue>) {
    match node.kind {
        NodeKind::Object => match value {
            Value::Object(map) => check_object(map, node, ptr, out),
            other => out.push(mismatch(ptr, "object", other)),
        },
        NodeKind::Scalar(kind) => check_scalar(value, kind, node, ptr, out),
        NodeKind::Array(kind) => match value {
            Value::Array(items) => {
                for (j, item) in items.iter().enumerate() {
                    check_scalar(item, kind, node, &pointer::push_index(ptr, j), out);
                }
            }
            other => out.push(mismatch(ptr, "array", other)),
        },
    }
}

fn check_scalar(
    value: &Value,
    kind: Primitive,
    node: &PropertyNode,
    ptr: &str,
    out: &mut Vec<ValidationIssue>,
) {
    if !has_type(value, kind) {
        out.push(mismatch(ptr, kind.as_str(), value));
        return;
    }
    let Value::String(s) = value else {
        return;
    };
    if let Some(format) = node.format {
        if !format.matches(s) {
            out.push(ValidationIssue::pointer(
                IssueCode::SchemaFormatInvalid,
                ptr,
                format!("{s:?} is not {}", format.expected()),
            ));
        }
    }
    if let Some(allowed) = &node.enum_values {
        if !allowed.iter().any(|a| a == s) {
            out.push(ValidationIssue::pointer(
                IssueCode::SchemaEnumViolation,
                ptr,
                format!("{s:?} is not one of {}", allowed.join(", ")),
            ));
        }
    }
}

/// A number is an integer when its value is integral, so `1.0` passes.
fn has_type(value: &Value, kind: Primitive) -> bool {
    match (kind, value) {
        (Primitive::String, Value::String(_)) => true,
        (Primitive::Number, Value::Number(_)) => true,
        (Primitive::Boolean, Value::Bool(_)) => true,
        (Primitive::Integer, Value::Number(n)) => {
            n.is_i64()
                || n.is_u64()
                || n.as_f64()
                    .is_some_and(|f| f.is_finite() && f.fract() == 0.0)
        }
        _ => false,
    }
}

fn mismatch(ptr: &str, expected: &str, found: &Value) -> ValidationIssue {
    ValidationIssue::pointer(
        IssueCode::SchemaTypeMismatch,
        ptr,
        format!("expected {expected}, found {}", json_type(found)),
    )
}

fn json_type(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}
