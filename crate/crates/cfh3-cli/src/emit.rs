//! Artifact plumbing: output formats, string tables, and deterministic
//! file writing.
//!
//! Every artifact is a pure function of the command arguments and
//! configuration — no timestamps, hostnames, or other run-specific noise
//! — so two runs with the same inputs write byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use cfh3::rat::{format_rat, format_rat_decimal};
use cfh3::{Error, Rat, Result};

/// Table format of the written artifacts.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// Comma-separated tables, one file per table.
    Csv,
    /// Structured JSON documents.
    Json,
}

/// Output directory handle; creates the directory up front and reports
/// every file it writes on standard output.
pub struct Artifacts {
    dir: PathBuf,
}

impl Artifacts {
    /// Prepares the output directory.
    pub fn new(dir: &Path) -> Result<Artifacts> {
        fs::create_dir_all(dir)?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
        })
    }

    /// Writes one artifact verbatim.
    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, text)?;
        println!("wrote {}", path.display());
        Ok(path)
    }

    /// Writes one value as pretty-printed JSON with a trailing newline.
    pub fn write_json<T: Serialize>(&self, stem: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| Error::Serde(format!("{stem}: {e}")))?;
        text.push('\n');
        self.write_text(&format!("{stem}.json"), &text)
    }

    /// Writes one table in the selected format: a CSV file, or a JSON
    /// document `{...meta, "rows": [...]}` with one object per row.
    pub fn write_table(
        &self,
        stem: &str,
        format: Format,
        meta: Value,
        table: &Table,
    ) -> Result<PathBuf> {
        match format {
            Format::Csv => self.write_text(&format!("{stem}.csv"), &table.to_csv()),
            Format::Json => self.write_json(stem, &table.to_json_with(meta)),
        }
    }
}

/// A rectangular string table with a fixed header.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    /// New table with the given column names.
    pub fn new(header: &[&str]) -> Table {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends one row; the width must match the header.
    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "table row width must match the header"
        );
        self.rows.push(row);
    }

    /// Renders the table as CSV.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("csv header");
        for row in &self.rows {
            w.write_record(row).expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv buffer")).expect("csv utf8")
    }

    /// Renders the table as a JSON document: the meta object's fields,
    /// plus `rows`, an array of header-keyed objects.
    pub fn to_json_with(&self, meta: Value) -> Value {
        let mut doc = match meta {
            Value::Object(map) => map,
            Value::Null => serde_json::Map::new(),
            other => {
                let mut map = serde_json::Map::new();
                map.insert("meta".into(), other);
                map
            }
        };
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (key, cell) in self.header.iter().zip(row) {
                    obj.insert(key.clone(), Value::String(cell.clone()));
                }
                Value::Object(obj)
            })
            .collect();
        doc.insert("rows".into(), Value::Array(rows));
        Value::Object(doc)
    }
}

/// The exact `p/q` form of a rational, for a table cell.
pub fn rat_cell(r: &Rat) -> String {
    format_rat(r)
}

/// The 12-significant-digit decimal form of a rational, for a table cell.
pub fn rat_decimal_cell(r: &Rat) -> String {
    format_rat_decimal(r)
}

/// A float in fixed scientific notation, for a table cell.
pub fn f64_cell(v: f64) -> String {
    format!("{v:.12e}")
}

/// A boolean as `true`/`false`, for a table cell.
pub fn bool_cell(b: bool) -> String {
    b.to_string()
}
