//! Schema flattening: one column per leaf property, plus the nested row
//! template whose leaves are the column headers.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::formats::Format;
use crate::schema_model::{NodeKind, Primitive, PropertyNode, SchemaDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DataType {
    Scalar(Primitive),
    /// Cells hold `;`-separated items.
    Array(Primitive),
}

impl DataType {
    pub fn item(self) -> Primitive {
        match self {
            DataType::Scalar(p) | DataType::Array(p) => p,
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataType::Scalar(p) => write!(f, "{p}"),
            DataType::Array(p) => write!(f, "array-of-{p}"),
        }
    }
}

impl FromStr for DataType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parsed = match s.strip_prefix("array-of-") {
            Some(item) => Primitive::parse(item).map(DataType::Array),
            None => Primitive::parse(s).map(DataType::Scalar),
        };
        parsed.ok_or_else(|| format!("unknown data type {s:?}"))
    }
}

impl TryFrom<String> for DataType {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<DataType> for String {
    fn from(d: DataType) -> Self {
        d.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ColumnSpec {
    pub header: String,
    /// Property names from the root down to the leaf.
    pub path: Vec<String>,
    pub data_type: DataType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enum_values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// True when every hop of `path` is required, i.e. the cell may never
    /// be blank.
    pub required: bool,
    /// Per-hop `required` flags, aligned with `path`. A hop that is
    /// required while an ancestor is optional becomes mandatory once
    /// its parent object is present in a row.
    pub path_required: Vec<bool>,
}

/// Nested skeleton mirroring the schema's object tree; each leaf holds
/// the header text of its column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RowTemplate {
    pub skeleton: Value,
}

impl RowTemplate {
    /// Rebuilds the skeleton from column paths alone.
    pub fn from_columns(cols: &[ColumnSpec]) -> Result<Self> {
        let mut root = Map::new();
        for col in cols {
            let (leaf, parents) = col
                .path
                .split_last()
                .ok_or_else(|| Error::ManifestMismatch {
                    reason: format!("column {:?} has an empty path", col.header),
                })?;
            let mut cursor = &mut root;
            for name in parents {
                let slot = cursor
                    .entry(name.clone())
                    .or_insert_with(|| Value::Object(Map::new()));
                cursor = slot
                    .as_object_mut()
                    .ok_or_else(|| Error::ManifestMismatch {
                        reason: format!("path of column {:?} runs through a leaf", col.header),
                    })?;
            }
            if cursor
                .insert(leaf.clone(), Value::String(col.header.clone()))
                .is_some()
            {
                return Err(Error::ManifestMismatch {
                    reason: format!("two columns share the path of {:?}", col.header),
                });
            }
        }
        Ok(RowTemplate {
            skeleton: Value::Object(root),
        })
    }

    /// Leaf placeholder texts in document order.
    pub fn placeholders(&self) -> Vec<&str> {
        fn walk<'a>(v: &'a Value, out: &mut Vec<&'a str>) {
            match v {
                Value::Object(map) => map.values().for_each(|c| walk(c, out)),
                Value::String(s) => out.push(s),
                _ => {}
            }
        }
        let mut out = Vec::new();
        walk(&self.skeleton, &mut out);
        out
    }
}

/// Depth-first, document-order list of leaf columns.
pub fn get_keys(doc: &SchemaDocument) -> Result<Vec<ColumnSpec>> {
    let mut cols = Vec::with_capacity(doc.leaf_count());
    let mut path = Vec::new();
    let mut hops = Vec::new();
    for child in &doc.root.children {
        collect(child, &mut path, &mut hops, &mut cols);
    }
    let mut seen = HashSet::with_capacity(cols.len());
    for col in &cols {
        if !seen.insert(col.header.as_str()) {
            return Err(Error::DuplicateHeader {
                header: col.header.clone(),
            });
        }
    }
    Ok(cols)
}

fn collect(
    node: &PropertyNode,
    path: &mut Vec<String>,
    hops: &mut Vec<bool>,
    out: &mut Vec<ColumnSpec>,
) {
    path.push(node.name.clone());
    hops.push(node.required);
    let data_type = match node.kind {
        NodeKind::Object => None,
        NodeKind::Scalar(p) => Some(DataType::Scalar(p)),
        NodeKind::Array(p) => Some(DataType::Array(p)),
    };
    match data_type {
        None => node
            .children
            .iter()
            .for_each(|c| collect(c, path, hops, out)),
        Some(data_type) => out.push(ColumnSpec {
            header: node
                .display_name
                .clone()
                .unwrap_or_else(|| node.name.clone()),
            path: path.clone(),
            data_type,
            format: node.format,
            enum_values: node.enum_values.clone(),
            note: node.description.clone(),
            required: hops.iter().all(|r| *r),
            path_required: hops.clone(),
        }),
    }
    path.pop();
    hops.pop();
}

/// Builds the row template for `doc`. `cols` must come from
/// [`get_keys`] on the same document.
pub fn merge_properties(doc: &SchemaDocument, cols: &[ColumnSpec]) -> RowTemplate {
    fn fill<'a>(node: &PropertyNode, cols: &mut impl Iterator<Item = &'a ColumnSpec>) -> Value {
        if node.is_leaf() {
            let col = cols
                .next()
                .expect("columns were not produced from this document");
            debug_assert_eq!(col.path.last(), Some(&node.name));
            return Value::String(col.header.clone());
        }
        let map = node
            .children
            .iter()
            .map(|c| (c.name.clone(), fill(c, cols)))
            .collect();
        Value::Object(map)
    }
    let mut iter = cols.iter();
    let skeleton = fill(&doc.root, &mut iter);
    assert!(
        iter.next().is_none(),
        "columns were not produced from this document"
    );
    RowTemplate { skeleton }
}
