//! Random schemas and clean rows for property tests.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use leisheet_core::schema_model::{NodeKind, Primitive, PropertyNode, SchemaDocument};
use leisheet_core::{ColumnSpec, DataType};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Map, Value};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub const STRAY_KEYWORDS: &[&str] = &["minimum", "pattern", "$comment", "oneOf", "maxLength"];

pub struct SchemaGen {
    counter: usize,
    leaves: usize,
    pub max_leaves: usize,
    pub max_depth: usize,
    /// Stray keyword occurrences inserted, by keyword.
    pub strays: HashMap<&'static str, usize>,
}

impl SchemaGen {
    pub fn new(max_depth: usize, max_leaves: usize) -> Self {
        SchemaGen {
            counter: 0,
            leaves: 0,
            max_leaves,
            max_depth,
            strays: HashMap::new(),
        }
    }

    pub fn schema(&mut self, rng: &mut impl Rng) -> Value {
        let props = self.properties(rng, 1);
        let mut root =
            json!({"description": format!("event{}", rng.gen_range(0..100)), "type": "object"});
        self.finish_object(&mut root, props, rng);
        self.maybe_stray(&mut root, rng);
        root
    }

    fn finish_object(&mut self, obj: &mut Value, props: Map<String, Value>, rng: &mut impl Rng) {
        let required: Vec<String> = props
            .keys()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect();
        obj["properties"] = Value::Object(props);
        if !required.is_empty() {
            obj["required"] = json!(required);
        }
    }

    fn maybe_stray(&mut self, node: &mut Value, rng: &mut impl Rng) {
        if rng.gen_bool(0.2) {
            let k = *STRAY_KEYWORDS.choose(rng).unwrap();
            if node.get(k).is_none() {
                node[k] = json!(1);
                *self.strays.entry(k).or_default() += 1;
            }
        }
    }

    fn properties(&mut self, rng: &mut impl Rng, depth: usize) -> Map<String, Value> {
        let mut props = Map::new();
        let n = rng.gen_range(1..=6);
        for _ in 0..n {
            if self.leaves >= self.max_leaves {
                break;
            }
            self.counter += 1;
            let name = format!("p{}", self.counter);
            let node = if depth < self.max_depth && rng.gen_bool(0.25) {
                let children = self.properties(rng, depth + 1);
                if children.is_empty() {
                    continue;
                }
                let mut obj = json!({"type": "object"});
                self.finish_object(&mut obj, children, rng);
                obj
            } else {
                self.leaves += 1;
                self.leaf(rng)
            };
            let mut node = node;
            if rng.gen_bool(0.7) {
                node["displayName"] = json!(format!("Field {}", self.counter));
            }
            if rng.gen_bool(0.5) {
                node["description"] = json!(format!("Note for {name}."));
            }
            self.maybe_stray(&mut node, rng);
            props.insert(name, node);
        }
        props
    }

    fn leaf(&mut self, rng: &mut impl Rng) -> Value {
        let scalar = |rng: &mut dyn rand::RngCore| -> Value {
            match rng.gen_range(0..8) {
                0 => json!({"type": "number"}),
                1 => json!({"type": "integer"}),
                2 => json!({"type": "boolean"}),
                3 => json!({"type": "string", "format": "date"}),
                4 => json!({"type": "string", "format": "date-time"}),
                5 => json!({"type": "string", "format": "email"}),
                6 => json!({"type": "string", "enum": ["alpha", "beta", "gamma"]}),
                _ => json!({"type": "string"}),
            }
        };
        if rng.gen_bool(0.15) {
            json!({"type": "array", "items": scalar(rng)})
        } else {
            scalar(rng)
        }
    }
}

/// Valid raw cell text for one column.
pub fn valid_cell(col: &ColumnSpec, rng: &mut impl Rng) -> String {
    let one = |rng: &mut dyn rand::RngCore| -> String {
        match col.data_type.item() {
            Primitive::Number => format!("{:.2}", rng.gen_range(-500.0..500.0)),
            Primitive::Integer => rng.gen_range(-50..500).to_string(),
            Primitive::Boolean => ["true", "FALSE", "True"][rng.gen_range(0..3)].to_owned(),
            Primitive::String => {
                if let Some(values) = &col.enum_values {
                    values[rng.gen_range(0..values.len())].clone()
                } else {
                    match col.format.map(|f| f.as_str()) {
                        Some("date") => format!(
                            "2023-{:02}-{:02}",
                            rng.gen_range(1..=12),
                            rng.gen_range(1..=28)
                        ),
                        Some("date-time") => format!(
                            "2023-05-{:02}T10:{:02}:00+10:00",
                            rng.gen_range(1..=28),
                            rng.gen_range(0..60)
                        ),
                        Some("email") => format!(
                            "user{}@farm{}.com.au",
                            rng.gen_range(0..99),
                            rng.gen_range(0..9)
                        ),
                        _ => format!(
                            "text {}, \"q\" {}",
                            rng.gen_range(0..1000),
                            rng.gen_range(0..9)
                        ),
                    }
                }
            }
        }
    };
    match col.data_type {
        DataType::Scalar(_) => one(rng),
        DataType::Array(_) => {
            let n = rng.gen_range(1..4);
            (0..n)
                .map(|_| one(rng).replace(';', ","))
                .collect::<Vec<_>>()
                .join(";")
        }
    }
}

/// Raw text that fails coercion for `col`, or `None` when every
/// non-blank text is acceptable (plain strings).
pub fn invalid_cell(col: &ColumnSpec) -> Option<String> {
    let bad = match col.data_type.item() {
        Primitive::Number | Primitive::Integer => "abc".to_owned(),
        Primitive::Boolean => "maybe".to_owned(),
        Primitive::String => match (&col.enum_values, col.format) {
            (Some(_), _) => "zz-not-a-member".to_owned(),
            (None, Some(_)) => "not valid!".to_owned(),
            (None, None) => {
                return matches!(col.data_type, DataType::Array(_)).then(|| ";;".to_owned())
            }
        },
    };
    Some(bad)
}

/// A clean row as header -> raw text. Presence is decided top-down so
/// that every present object carries all its required children.
pub fn clean_row(
    doc: &SchemaDocument,
    cols: &[ColumnSpec],
    rng: &mut impl Rng,
) -> HashMap<String, String> {
    let by_path: HashMap<Vec<String>, &ColumnSpec> =
        cols.iter().map(|c| (c.path.clone(), c)).collect();
    let mut out = HashMap::new();
    let mut path = Vec::new();
    fill_object(&doc.root, &by_path, &mut path, rng, &mut out);
    out
}

fn fill_object(
    node: &PropertyNode,
    by_path: &HashMap<Vec<String>, &ColumnSpec>,
    path: &mut Vec<String>,
    rng: &mut impl Rng,
    out: &mut HashMap<String, String>,
) -> bool {
    let mut any = false;
    for child in &node.children {
        if child.required || rng.gen_bool(0.6) {
            any |= fill_node(child, by_path, path, rng, out);
        }
    }
    if !any {
        if let Some(first) = node.children.first() {
            any = fill_node(first, by_path, path, rng, out);
        }
    }
    any
}

fn fill_node(
    node: &PropertyNode,
    by_path: &HashMap<Vec<String>, &ColumnSpec>,
    path: &mut Vec<String>,
    rng: &mut impl Rng,
    out: &mut HashMap<String, String>,
) -> bool {
    path.push(node.name.clone());
    let filled = match node.kind {
        NodeKind::Object => fill_object(node, by_path, path, rng, out),
        _ => {
            let col = by_path[path.as_slice()];
            out.insert(col.header.clone(), valid_cell(col, rng));
            true
        }
    };
    path.pop();
    filled
}

/// Renders rows to CSV bytes with columns in `order` (indices into cols).
pub fn render_csv(
    cols: &[ColumnSpec],
    order: &[usize],
    rows: &[HashMap<String, String>],
) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(order.iter().map(|&i| cols[i].header.as_str()))
        .unwrap();
    for row in rows {
        w.write_record(
            order
                .iter()
                .map(|&i| row.get(&cols[i].header).map(String::as_str).unwrap_or("")),
        )
        .unwrap();
    }
    w.into_inner().unwrap()
}
