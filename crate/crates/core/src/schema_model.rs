//! Event schema loading.
//!
//! Only a small keyword subset is interpreted: `type`, `properties`,
//! `required`, `description`, `displayName`, `enum`, `format` and
//! `items` (with a primitive item type). Any other keyword is recorded
//! as a [`SchemaWarning`] and otherwise ignored, so schemas written for
//! full JSON Schema validators still load.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::formats::Format;
use crate::pointer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Primitive {
    String,
    Number,
    Integer,
    Boolean,
}

impl Primitive {
    pub fn as_str(self) -> &'static str {
        match self {
            Primitive::String => "string",
            Primitive::Number => "number",
            Primitive::Integer => "integer",
            Primitive::Boolean => "boolean",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "string" => Some(Primitive::String),
            "number" => Some(Primitive::Number),
            "integer" => Some(Primitive::Integer),
            "boolean" => Some(Primitive::Boolean),
            _ => None,
        }
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Node kind. Arrays carry their (primitive) item kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Object,
    Scalar(Primitive),
    Array(Primitive),
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKind::Object => f.write_str("object"),
            NodeKind::Scalar(p) => write!(f, "{p}"),
            NodeKind::Array(p) => write!(f, "array of {p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyNode {
    pub name: String,
    pub display_name: Option<String>,
    pub description: Option<String>,
    pub kind: NodeKind,
    /// For arrays, applies to each item.
    pub format: Option<Format>,
    /// For arrays, applies to each item.
    pub enum_values: Option<Vec<String>>,
    /// Non-empty exactly when `kind` is `Object` (the root may be empty).
    pub children: Vec<PropertyNode>,
    /// Listed in the parent's `required` array. Always true for the root.
    pub required: bool,
}

impl PropertyNode {
    pub fn is_leaf(&self) -> bool {
        self.kind != NodeKind::Object
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(PropertyNode::leaf_count).sum()
        }
    }
}

/// A keyword the loader skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaWarning {
    /// JSON Pointer of the schema node carrying the keyword.
    pub pointer: String,
    pub keyword: String,
    pub message: String,
}

impl fmt::Display for SchemaWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() {
            "(root)"
        } else {
            &self.pointer
        };
        write!(f, "{at}: {}: {}", self.keyword, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaDocument {
    pub event_name: String,
    pub root: PropertyNode,
    pub source_path: String,
    pub warnings: Vec<SchemaWarning>,
}

impl SchemaDocument {
    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }
}

pub fn load_schema(path: impl AsRef<Path>) -> Result<SchemaDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_schema(&text, &path.display().to_string())
}

/// Parses schema text. `source_path` is only used for messages and
/// recorded on the document.
pub fn parse_schema(text: &str, source_path: &str) -> Result<SchemaDocument> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let value: Value = serde_json::from_str(text).map_err(|source| Error::Parse {
        path: source_path.to_owned(),
        source,
    })?;
    schema_from_value(&value, source_path)
}

pub fn schema_from_value(value: &Value, source_path: &str) -> Result<SchemaDocument> {
    let obj = value.as_object().ok_or_else(|| Error::NotObjectRoot {
        path: source_path.to_owned(),
    })?;
    if obj.get("type").and_then(Value::as_str) != Some("object") {
        return Err(Error::NotObjectRoot {
            path: source_path.to_owned(),
        });
    }
    let event_name = obj
        .get("description")
        .and_then(Value::as_str)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::MissingEventName {
            path: source_path.to_owned(),
        })?
        .to_owned();

    let mut loader = Loader::default();
    let root = loader.node(obj, "", "", true)?;
    Ok(SchemaDocument {
        event_name,
        root,
        source_path: source_path.to_owned(),
        warnings: loader.warnings,
    })
}

/// Top-level keys every generated event carries besides its properties.
pub const RESERVED_EVENT_KEYS: &[&str] = &["eventName", "producer"];

const OBJECT_KEYWORDS: &[&str] = &[
    "type",
    "properties",
    "required",
    "description",
    "displayName",
];
const SCALAR_KEYWORDS: &[&str] = &["type", "description", "displayName", "enum", "format"];
const ARRAY_KEYWORDS: &[&str] = &["type", "description", "displayName", "items"];
const ITEM_KEYWORDS: &[&str] = &["type", "description", "enum", "format"];

#[derive(Default)]
struct Loader {
    warnings: Vec<SchemaWarning>,
}

impl Loader {
    fn warn(&mut self, pointer: &str, keyword: &str, message: impl Into<String>) {
        self.warnings.push(SchemaWarning {
            pointer: pointer.to_owned(),
            keyword: keyword.to_owned(),
            message: message.into(),
        });
    }

    fn warn_unsupported(&mut self, obj: &Map<String, Value>, ptr: &str, allowed: &[&str]) {
        for key in obj.keys() {
            if !allowed.contains(&key.as_str()) {
                self.warn(ptr, key, "keyword not supported here; ignored");
            }
        }
    }

    fn node(
        &mut self,
        obj: &Map<String, Value>,
        name: &str,
        ptr: &str,
        required: bool,
    ) -> Result<PropertyNode> {
        let is_root = ptr.is_empty();
        let kind_name = match obj.get("type") {
            Some(Value::String(s)) => s.as_str(),
            Some(_) => return Err(unsupported(ptr, "\"type\" must be a single type name")),
            None if obj.contains_key("properties") => "object",
            None => return Err(unsupported(ptr, "property has no \"type\"")),
        };
        let description = optional_text(obj, "description", ptr)?;
        let display_name = optional_text(obj, "displayName", ptr)?;

        let mut node = PropertyNode {
            name: name.to_owned(),
            display_name,
            description,
            kind: NodeKind::Object,
            format: None,
            enum_values: None,
            children: Vec::new(),
            required,
        };

        match kind_name {
            "object" => {
                self.warn_unsupported(obj, ptr, OBJECT_KEYWORDS);
                node.children = self.children(obj, ptr)?;
                if node.children.is_empty() && !is_root {
                    return Err(unsupported(ptr, "object property declares no properties"));
                }
            }
            "array" => {
                self.warn_unsupported(obj, ptr, ARRAY_KEYWORDS);
                let items_ptr = pointer::push(ptr, "items");
                let items = match obj.get("items") {
                    Some(Value::Object(items)) => items,
                    Some(_) => {
                        return Err(unsupported(&items_ptr, "\"items\" must be a single schema"))
                    }
                    None => return Err(unsupported(ptr, "array property without \"items\"")),
                };
                let item_kind = match items.get("type").and_then(Value::as_str) {
                    Some("object") | Some("array") => {
                        return Err(unsupported(
                            &items_ptr,
                            "arrays of objects or arrays are not supported",
                        ))
                    }
                    Some(t) => Primitive::parse(t).ok_or_else(|| {
                        unsupported(&items_ptr, format!("unknown item type {t:?}"))
                    })?,
                    None if items.contains_key("properties") => {
                        return Err(unsupported(
                            &items_ptr,
                            "arrays of objects or arrays are not supported",
                        ))
                    }
                    None => {
                        return Err(unsupported(
                            &items_ptr,
                            "array items have no primitive \"type\"",
                        ))
                    }
                };
                self.warn_unsupported(items, &items_ptr, ITEM_KEYWORDS);
                node.kind = NodeKind::Array(item_kind);
                self.rules(&mut node, items, &items_ptr, item_kind)?;
            }
            other => {
                let primitive = Primitive::parse(other)
                    .ok_or_else(|| unsupported(ptr, format!("unknown type {other:?}")))?;
                self.warn_unsupported(obj, ptr, SCALAR_KEYWORDS);
                node.kind = NodeKind::Scalar(primitive);
                self.rules(&mut node, obj, ptr, primitive)?;
            }
        }
        Ok(node)
    }

    fn children(&mut self, obj: &Map<String, Value>, ptr: &str) -> Result<Vec<PropertyNode>> {
        let props_ptr = pointer::push(ptr, "properties");
        let props = match obj.get("properties") {
            None => return Ok(Vec::new()),
            Some(Value::Object(p)) => p,
            Some(_) => return Err(unsupported(&props_ptr, "\"properties\" must be an object")),
        };
        let required: Vec<&str> = match obj.get("required") {
            None => Vec::new(),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_str()
                        .ok_or_else(|| unsupported(ptr, "\"required\" must list property names"))
                })
                .collect::<Result<_>>()?,
            Some(_) => return Err(unsupported(ptr, "\"required\" must be an array")),
        };
        for name in &required {
            if !props.contains_key(*name) {
                self.warn(
                    ptr,
                    "required",
                    format!("{name:?} is required but not declared"),
                );
            }
        }

        let mut children = Vec::with_capacity(props.len());
        for (name, schema) in props {
            let child_ptr = pointer::push(&props_ptr, name);
            if name.is_empty() {
                return Err(unsupported(&child_ptr, "empty property name"));
            }
            if ptr.is_empty() && RESERVED_EVENT_KEYS.contains(&name.as_str()) {
                return Err(unsupported(
                    &child_ptr,
                    "name is reserved for the event envelope",
                ));
            }
            let child = schema
                .as_object()
                .ok_or_else(|| unsupported(&child_ptr, "property schema must be an object"))?;
            let is_required = required.contains(&name.as_str());
            children.push(self.node(child, name, &child_ptr, is_required)?);
        }
        Ok(children)
    }

    /// Reads `enum` and `format` from `src` (the node itself or its `items`).
    fn rules(
        &mut self,
        node: &mut PropertyNode,
        src: &Map<String, Value>,
        ptr: &str,
        kind: Primitive,
    ) -> Result<()> {
        if let Some(values) = src.get("enum") {
            if kind != Primitive::String {
                return Err(unsupported(
                    ptr,
                    "\"enum\" is only supported on string values",
                ));
            }
            let list = values
                .as_array()
                .filter(|a| !a.is_empty())
                .ok_or_else(|| unsupported(ptr, "\"enum\" must be a non-empty array"))?;
            let mut out: Vec<String> = Vec::with_capacity(list.len());
            for v in list {
                let s = v
                    .as_str()
                    .ok_or_else(|| unsupported(ptr, "\"enum\" values must be strings"))?;
                if out.iter().any(|seen| seen == s) {
                    return Err(unsupported(ptr, format!("duplicate enum value {s:?}")));
                }
                out.push(s.to_owned());
            }
            node.enum_values = Some(out);
        }
        if let Some(format) = src.get("format") {
            match format.as_str().map(str::parse::<Format>) {
                Some(Ok(f)) if kind == Primitive::String => node.format = Some(f),
                Some(Ok(f)) => self.warn(
                    ptr,
                    "format",
                    format!("format {f} ignored on {kind} values"),
                ),
                Some(Err(())) => self.warn(
                    ptr,
                    "format",
                    format!("unsupported format {format}; ignored"),
                ),
                None => return Err(unsupported(ptr, "\"format\" must be a string")),
            }
        }
        Ok(())
    }
}

fn optional_text(obj: &Map<String, Value>, key: &str, ptr: &str) -> Result<Option<String>> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.trim().to_owned()).filter(|s| !s.is_empty())),
        Some(_) => Err(unsupported(ptr, format!("\"{key}\" must be a string"))),
    }
}

fn unsupported(ptr: &str, reason: impl Into<String>) -> Error {
    Error::UnsupportedStructure {
        pointer: if ptr.is_empty() {
            "/".to_owned()
        } else {
            ptr.to_owned()
        },
        reason: reason.into(),
    }
}
