// SPDX-License-Identifier: Apache-2.0

//! CSV tables and their JSON schema sidecars.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnType {
    Float,
    Integer,
    Bool,
    String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: ColumnType,
    pub unit: &'static str,
    pub description: String,
}

pub fn column(name: impl Into<String>, kind: ColumnType, unit: &'static str, description: impl Into<String>) -> Column {
    Column {
        name: name.into(),
        kind,
        unit,
        description: description.into(),
    }
}

pub fn float(name: impl Into<String>, unit: &'static str, description: impl Into<String>) -> Column {
    column(name, ColumnType::Float, unit, description)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

/// Shortest round-trip decimal, switching to exponent form outside
/// `[1e−4, 1e15)`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub stem: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(stem: impl Into<String>, columns: Vec<Column>) -> Self {
        Self {
            stem: stem.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.stem);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(self.columns.iter().map(|c| c.name.as_str())).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

#[derive(Serialize)]
struct Schema<'a> {
    file: String,
    task: &'a str,
    seed: u64,
    rows: usize,
    columns: &'a [Column],
}

/// Writes `<stem>.csv` and `<stem>.schema.json` into `dir`.
pub fn write_table(dir: &Path, table: &Table, task: &str, seed: u64) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let csv_path = dir.join(format!("{}.csv", table.stem));
    let schema_path = dir.join(format!("{}.schema.json", table.stem));
    let schema = Schema {
        file: format!("{}.csv", table.stem),
        task,
        seed,
        rows: table.rows.len(),
        columns: &table.columns,
    };
    let mut json = serde_json::to_string_pretty(&schema).map_err(|e| CliError::Io(e.to_string()))?;
    json.push('\n');
    fs::write(&csv_path, table.to_csv()?).map_err(|e| CliError::Io(format!("{}: {e}", csv_path.display())))?;
    fs::write(&schema_path, json).map_err(|e| CliError::Io(format!("{}: {e}", schema_path.display())))?;
    Ok(vec![csv_path, schema_path])
}
