//! On-disk template bundle: `template.csv` holds the header row a user
//! fills in, `lei-template.json` carries everything a CSV cannot (notes,
//! types, formats, enums, required flags) plus the row template.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flattener::{get_keys, merge_properties, ColumnSpec, RowTemplate};
use crate::schema_model::SchemaDocument;

pub const CSV_FILE: &str = "template.csv";
pub const MANIFEST_FILE: &str = "lei-template.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TemplateBundle {
    pub event_name: String,
    pub schema_path: String,
    pub columns: Vec<ColumnSpec>,
    pub row_template: RowTemplate,
}

impl TemplateBundle {
    /// Flattens `doc` into a bundle.
    pub fn from_schema(doc: &SchemaDocument) -> Result<Self> {
        let columns = get_keys(doc)?;
        let row_template = merge_properties(doc, &columns);
        Ok(TemplateBundle {
            event_name: doc.event_name.clone(),
            schema_path: doc.source_path.clone(),
            columns,
            row_template,
        })
    }

    pub fn headers(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.header.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WrittenFiles {
    pub csv: PathBuf,
    pub manifest: PathBuf,
}

/// Renders the two bundle files to strings: `(template.csv, manifest)`.
pub fn render_bundle(bundle: &TemplateBundle) -> Result<(String, String)> {
    let csv = header_row(bundle.headers())?;
    let mut manifest =
        serde_json::to_string_pretty(bundle).expect("bundle serialization is infallible");
    manifest.push('\n');
    Ok((csv, manifest))
}

fn header_row<'a>(headers: impl Iterator<Item = &'a str>) -> Result<String> {
    let headers: Vec<&str> = headers.collect();
    if headers.is_empty() {
        return Ok("\n".to_owned());
    }
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(&headers).map_err(|source| Error::Csv {
        path: PathBuf::from(CSV_FILE),
        source,
    })?;
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::io(CSV_FILE, e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("headers are UTF-8"))
}

pub fn write_bundle(bundle: &TemplateBundle, dir: impl AsRef<Path>) -> Result<WrittenFiles> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (csv, manifest) = render_bundle(bundle)?;
    let files = WrittenFiles {
        csv: dir.join(CSV_FILE),
        manifest: dir.join(MANIFEST_FILE),
    };
    fs::write(&files.csv, csv).map_err(|e| Error::io(&files.csv, e))?;
    fs::write(&files.manifest, manifest).map_err(|e| Error::io(&files.manifest, e))?;
    Ok(files)
}

pub fn read_bundle(dir: impl AsRef<Path>) -> Result<TemplateBundle> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST_FILE);
    let csv_path = dir.join(CSV_FILE);
    let manifest = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let csv_text = fs::read_to_string(&csv_path).map_err(|e| Error::io(&csv_path, e))?;

    let bundle: TemplateBundle =
        serde_json::from_str(&manifest).map_err(|source| Error::Parse {
            path: manifest_path.display().to_string(),
            source,
        })?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(csv_text.trim_start_matches('\u{feff}').as_bytes());
    let csv_headers: Vec<String> = match reader.records().next() {
        None => Vec::new(),
        Some(record) => record
            .map_err(|source| Error::Csv {
                path: csv_path.clone(),
                source,
            })?
            .iter()
            .map(|h| h.trim().to_owned())
            .collect(),
    };
    check_consistency(&bundle, &csv_headers)?;
    Ok(bundle)
}

fn check_consistency(bundle: &TemplateBundle, csv_headers: &[String]) -> Result<()> {
    let manifest_headers: Vec<&str> = bundle.headers().collect();
    if csv_headers
        .iter()
        .map(String::as_str)
        .ne(manifest_headers.iter().copied())
    {
        return Err(Error::ManifestMismatch {
            reason: format!(
                "{CSV_FILE} has headers {csv_headers:?}, manifest lists {manifest_headers:?}"
            ),
        });
    }
    let mut seen = HashSet::new();
    if let Some(dup) = manifest_headers.iter().find(|h| !seen.insert(**h)) {
        return Err(Error::ManifestMismatch {
            reason: format!("header {dup:?} appears twice"),
        });
    }
    for col in &bundle.columns {
        if col.path.len() != col.path_required.len() {
            return Err(Error::ManifestMismatch {
                reason: format!(
                    "column {:?}: pathRequired does not align with path",
                    col.header
                ),
            });
        }
    }
    if RowTemplate::from_columns(&bundle.columns)? != bundle.row_template {
        return Err(Error::ManifestMismatch {
            reason: "rowTemplate does not match the column paths".to_owned(),
        });
    }
    Ok(())
}
