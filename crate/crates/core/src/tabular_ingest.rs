//! Reading a filled CSV, binding its columns to [`ColumnSpec`]s by header
//! name, and coercing each cell to a typed value.
//!
//! Column order in the data file is irrelevant: binding is by trimmed
//! header text. Every problem is collected as a located
//! [`ValidationIssue`] instead of stopping at the first bad cell.
//!
//! Data rows are numbered from 1, starting with the first record after
//! the header row. Physically empty lines are not records.

use std::collections::HashMap;
use std::path::Path;

use serde_json::{Number, Value};

use crate::error::{Error, Result};
use crate::flattener::{ColumnSpec, DataType};
use crate::issue::{IssueCode, ValidationIssue};
use crate::schema_model::Primitive;

/// Array cells hold items separated by this character. Items cannot
/// themselves contain it.
pub const ITEM_DELIMITER: char = ';';

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRow {
    pub row: usize,
    pub cells: Vec<String>,
}

impl RawRow {
    pub fn cell(&self, index: usize) -> &str {
        self.cells.get(index).map(String::as_str).unwrap_or("")
    }

    pub fn is_blank(&self) -> bool {
        self.cells.iter().all(|c| c.trim().is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSheet {
    pub headers: Vec<String>,
    pub rows: Vec<RawRow>,
}

pub fn read_sheet(path: impl AsRef<Path>, delimiter: u8) -> Result<RawSheet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_sheet(&bytes, delimiter).map_err(|source| Error::Csv {
        path: path.to_owned(),
        source,
    })
}

pub fn parse_sheet(bytes: &[u8], delimiter: u8) -> std::result::Result<RawSheet, csv::Error> {
    let bytes = bytes.strip_prefix(b"\xef\xbb\xbf").unwrap_or(bytes);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .from_reader(bytes);
    let mut records = reader.records();
    let headers = match records.next() {
        None => Vec::new(),
        Some(r) => r?.iter().map(|h| h.trim().to_owned()).collect(),
    };
    let mut rows = Vec::new();
    for (i, record) in records.enumerate() {
        let record = record?;
        rows.push(RawRow {
            row: i + 1,
            cells: record.iter().map(str::to_owned).collect(),
        });
    }
    Ok(RawSheet { headers, rows })
}

/// Header-to-column association for one data file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    /// CSV column index for each [`ColumnSpec`], in spec order.
    pub indices: Vec<usize>,
    /// Non-fatal findings such as unknown extra columns.
    pub warnings: Vec<ValidationIssue>,
}

impl Binding {
    pub fn index_of(&self, cols: &[ColumnSpec], header: &str) -> Option<usize> {
        cols.iter()
            .position(|c| c.header == header)
            .map(|i| self.indices[i])
    }
}

/// Binds CSV headers to column specs by trimmed header text.
///
/// Columns with a blank header are ignored; spreadsheet exports often
/// carry trailing empty columns.
pub fn bind_columns(
    csv_headers: &[String],
    cols: &[ColumnSpec],
) -> std::result::Result<Binding, Vec<ValidationIssue>> {
    let mut positions: HashMap<&str, usize> = HashMap::with_capacity(csv_headers.len());
    let mut fatal = Vec::new();
    for (i, h) in csv_headers.iter().enumerate() {
        let h = h.trim();
        if h.is_empty() {
            continue;
        }
        if positions.insert(h, i).is_some() {
            fatal.push(ValidationIssue::column(
                IssueCode::DuplicateHeader,
                h,
                "header appears more than once in the data file",
            ));
        }
    }

    let mut indices = Vec::with_capacity(cols.len());
    for col in cols {
        match positions.get(col.header.as_str()) {
            Some(&i) => indices.push(i),
            None => fatal.push(ValidationIssue::column(
                IssueCode::MissingColumn,
                &col.header,
                "column required by the template is not in the data file",
            )),
        }
    }
    if !fatal.is_empty() {
        return Err(fatal);
    }

    let warnings = csv_headers
        .iter()
        .map(|h| h.trim())
        .filter(|h| !h.is_empty() && !cols.iter().any(|c| c.header == *h))
        .map(|h| {
            ValidationIssue::column(
                IssueCode::UnknownColumn,
                h,
                "column is not in the template; ignored",
            )
        })
        .collect();
    Ok(Binding { indices, warnings })
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellValue {
    Text(String),
    Number(Number),
    Integer(i64),
    Boolean(bool),
    List(Vec<CellValue>),
    Absent,
}

impl CellValue {
    pub fn is_absent(&self) -> bool {
        matches!(self, CellValue::Absent)
    }

    pub fn to_json(&self) -> Option<Value> {
        Some(match self {
            CellValue::Text(s) => Value::String(s.clone()),
            CellValue::Number(n) => Value::Number(n.clone()),
            CellValue::Integer(i) => Value::from(*i),
            CellValue::Boolean(b) => Value::Bool(*b),
            CellValue::List(items) => {
                Value::Array(items.iter().filter_map(CellValue::to_json).collect())
            }
            CellValue::Absent => return None,
        })
    }
}

/// Typed values for one data row, one slot per column spec.
#[derive(Debug, Clone, PartialEq)]
pub struct RowValues {
    pub row: usize,
    pub values: Vec<CellValue>,
}

/// Coerces one raw cell. Blank cells are `Absent`; required-ness is
/// checked by the caller.
pub fn coerce_cell(
    raw: &str,
    col: &ColumnSpec,
) -> std::result::Result<CellValue, (IssueCode, String)> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(CellValue::Absent);
    }
    match col.data_type {
        DataType::Scalar(kind) => coerce_scalar(raw, kind, col),
        DataType::Array(kind) => {
            let mut items = Vec::new();
            for (i, item) in raw.split(ITEM_DELIMITER).enumerate() {
                let item = item.trim();
                if item.is_empty() {
                    return Err((
                        IssueCode::TypeMismatch,
                        format!("item {} of the list is empty", i + 1),
                    ));
                }
                let value = coerce_scalar(item, kind, col)
                    .map_err(|(code, msg)| (code, format!("item {}: {msg}", i + 1)))?;
                items.push(value);
            }
            Ok(CellValue::List(items))
        }
    }
}

fn coerce_scalar(
    raw: &str,
    kind: Primitive,
    col: &ColumnSpec,
) -> std::result::Result<CellValue, (IssueCode, String)> {
    match kind {
        Primitive::Number => parse_number(raw)
            .map(CellValue::Number)
            .ok_or_else(|| (IssueCode::TypeMismatch, format!("{raw:?} is not a number"))),
        Primitive::Integer => parse_integer(raw).map(CellValue::Integer).ok_or_else(|| {
            (
                IssueCode::TypeMismatch,
                format!("{raw:?} is not a whole number"),
            )
        }),
        Primitive::Boolean => {
            if raw.eq_ignore_ascii_case("true") {
                Ok(CellValue::Boolean(true))
            } else if raw.eq_ignore_ascii_case("false") {
                Ok(CellValue::Boolean(false))
            } else {
                Err((
                    IssueCode::TypeMismatch,
                    format!("{raw:?} is not true or false"),
                ))
            }
        }
        Primitive::String => {
            if let Some(format) = col.format {
                if !format.matches(raw) {
                    return Err((
                        IssueCode::FormatInvalid,
                        format!("{raw:?} is not {}", format.expected()),
                    ));
                }
            }
            if let Some(allowed) = &col.enum_values {
                if !allowed.iter().any(|a| a == raw) {
                    return Err((
                        IssueCode::EnumViolation,
                        format!("{raw:?} is not one of {}", allowed.join(", ")),
                    ));
                }
            }
            Ok(CellValue::Text(raw.to_owned()))
        }
    }
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn strip_sign(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

/// Decimal literal with optional sign and exponent; `.` is the only
/// decimal separator. Plain integers stay integral in the output.
pub fn parse_number(raw: &str) -> Option<Number> {
    let unsigned = strip_sign(raw);
    let (mantissa, exponent) = match unsigned.find(['e', 'E']) {
        Some(i) => (&unsigned[..i], Some(&unsigned[i + 1..])),
        None => (unsigned, None),
    };
    let mantissa_ok = match mantissa.split_once('.') {
        Some((int, frac)) => {
            (is_digits(int) && (frac.is_empty() || is_digits(frac)))
                || (int.is_empty() && is_digits(frac))
        }
        None => is_digits(mantissa),
    };
    let exponent_ok = exponent.is_none_or(|e| is_digits(strip_sign(e)));
    if !mantissa_ok || !exponent_ok {
        return None;
    }
    if exponent.is_none() && !mantissa.contains('.') {
        if let Ok(i) = raw.parse::<i64>() {
            return Some(Number::from(i));
        }
    }
    raw.parse::<f64>().ok().and_then(Number::from_f64)
}

pub fn parse_integer(raw: &str) -> Option<i64> {
    if is_digits(strip_sign(raw)) {
        raw.parse().ok()
    } else {
        None
    }
}

/// Object nodes and leaves of the schema tree, reconstructed from
/// column paths, used for required checks inside optional subtrees.
struct PresenceTree {
    nodes: Vec<TreeNode>,
}

struct TreeNode {
    parent: Option<usize>,
    required: bool,
    leaf: bool,
    /// Column indices under this node, in column order.
    columns: Vec<usize>,
    /// Some column under this node is unconditionally required, so an
    /// absent node is already reported cell by cell.
    covered: bool,
}

impl PresenceTree {
    fn new(cols: &[ColumnSpec]) -> Self {
        let mut index: HashMap<&[String], usize> = HashMap::new();
        let mut nodes: Vec<TreeNode> = Vec::new();
        for (ci, col) in cols.iter().enumerate() {
            let mut parent = None;
            for depth in 0..col.path.len() {
                let prefix = &col.path[..=depth];
                let id = *index.entry(prefix).or_insert_with(|| {
                    nodes.push(TreeNode {
                        parent,
                        required: col.path_required.get(depth).copied().unwrap_or(false),
                        leaf: depth + 1 == col.path.len(),
                        columns: Vec::new(),
                        covered: false,
                    });
                    nodes.len() - 1
                });
                nodes[id].columns.push(ci);
                nodes[id].covered |= col.required;
                parent = Some(id);
            }
        }
        PresenceTree { nodes }
    }

    /// Returns the first column of every required node that is absent
    /// while its parent object is present, and whether that node is a
    /// group rather than a leaf.
    fn missing(&self, present: &[bool]) -> Vec<(usize, bool)> {
        let node_present: Vec<bool> = self
            .nodes
            .iter()
            .map(|n| n.columns.iter().any(|&c| present[c]))
            .collect();
        self.nodes
            .iter()
            .enumerate()
            .filter(|(id, n)| {
                n.required
                    && !n.covered
                    && !node_present[*id]
                    && n.parent.is_none_or(|p| node_present[p])
            })
            .map(|(_, n)| (n.columns[0], !n.leaf))
            .collect()
    }
}

/// Coerces every bound cell of every non-blank row.
///
/// Returns typed rows (blank rows skipped) and all issues, ordered by
/// (row, column spec index).
pub fn validate_cells(
    sheet: &RawSheet,
    binding: &Binding,
    cols: &[ColumnSpec],
) -> (Vec<RowValues>, Vec<ValidationIssue>) {
    let tree = PresenceTree::new(cols);
    let mut rows = Vec::with_capacity(sheet.rows.len());
    let mut located: Vec<(usize, usize, ValidationIssue)> = Vec::new();

    for raw in sheet.rows.iter().filter(|r| !r.is_blank()) {
        let mut values = Vec::with_capacity(cols.len());
        let mut present = Vec::with_capacity(cols.len());
        for (ci, col) in cols.iter().enumerate() {
            let cell = raw.cell(binding.indices[ci]);
            present.push(!cell.trim().is_empty());
            let value = match coerce_cell(cell, col) {
                Ok(CellValue::Absent) if col.required => {
                    located.push((
                        raw.row,
                        ci,
                        ValidationIssue::cell(
                            IssueCode::RequiredMissing,
                            raw.row,
                            &col.header,
                            "value is required",
                        ),
                    ));
                    CellValue::Absent
                }
                Ok(v) => v,
                Err((code, message)) => {
                    located.push((
                        raw.row,
                        ci,
                        ValidationIssue::cell(code, raw.row, &col.header, message),
                    ));
                    CellValue::Absent
                }
            };
            values.push(value);
        }
        for (ci, group) in tree.missing(&present) {
            let col = &cols[ci];
            let what = if group {
                "required group has no values while its parent has some"
            } else {
                "value is required when other fields of its group are filled"
            };
            located.push((
                raw.row,
                ci,
                ValidationIssue::cell(IssueCode::RequiredMissing, raw.row, &col.header, what),
            ));
        }
        rows.push(RowValues {
            row: raw.row,
            values,
        });
    }

    located.sort_by_key(|(row, ci, _)| (*row, *ci));
    (
        rows,
        located.into_iter().map(|(_, _, issue)| issue).collect(),
    )
}
