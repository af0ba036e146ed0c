//! Result records: one JSON document and one CSV table per run, written
//! atomically.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use twistchain::c64;

use crate::config::InputEntry;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

/// Shortest representation that parses back to the same bits.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Column {
    pub name: String,
    /// Which computation produced the column.
    pub source: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<=",
            tolerance,
            pass: value <= tolerance,
        }
    }

    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: ">",
            tolerance: bound,
            pass: value > bound,
        }
    }

    pub fn equals(name: impl Into<String>, value: usize, expected: usize) -> Self {
        Self {
            name: name.into(),
            value: value as f64,
            relation: "==",
            tolerance: expected as f64,
            pass: value == expected,
        }
    }

    pub fn holds(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            value: if pass { 1.0 } else { 0.0 },
            relation: "==",
            tolerance: 1.0,
            pass,
        }
    }
}

/// Column layout plus rows; complex values occupy a `_re`/`_im` pair.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn column(mut self, name: impl Into<String>, source: &'static str) -> Self {
        self.columns.push(Column {
            name: name.into(),
            source,
        });
        self
    }

    pub fn complex_column(self, name: &str, source: &'static str) -> Self {
        self.column(format!("{name}_re"), source).column(format!("{name}_im"), source)
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn complex_cells(z: c64) -> [Cell; 2] {
    [Cell::Num(z.re), Cell::Num(z.im)]
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub status: &'static str,
    pub input: Vec<InputEntry>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<Check>,
}

/// What a command hands back before it is stamped with its inputs.
#[derive(Debug, Default)]
pub struct Outcome {
    pub table: Table,
    pub summary: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn new(table: Table) -> Self {
        Self {
            table,
            ..Default::default()
        }
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) -> Result<(), CliError> {
        let v = serde_json::to_value(value).map_err(|e| CliError::Output(format!("cannot encode {key}: {e}")))?;
        self.summary.insert(key.to_string(), v);
        Ok(())
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn into_record(self, command: &str, target: Option<String>, input: Vec<InputEntry>) -> ResultRecord {
        let status = if self.failed_checks() == 0 { "ok" } else { "check_failed" };
        ResultRecord {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            target,
            status,
            input,
            columns: self.table.columns,
            rows: self.table.rows,
            summary: self.summary,
            checks: self.checks,
        }
    }
}

pub fn to_json(record: &ResultRecord) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(record).map_err(|e| CliError::Output(format!("cannot encode record: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv(record: &ResultRecord) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Output(format!("cannot encode table: {e}"));
    w.write_record(record.columns.iter().map(|c| c.name.as_str())).map_err(fail)?;
    for row in &record.rows {
        w.write_record(row.iter().map(Cell::csv_text)).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(format!("cannot encode table: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

/// Writes to a temporary file in the destination directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(format!("cannot write in {}", dir.display()), e))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))?;
    tmp.persist(path)
        .map_err(|e| CliError::io(format!("cannot rename into {}", path.display()), e.error))?;
    Ok(())
}

pub fn write_outputs(record: &ResultRecord, out: &Path, format: &str) -> Result<Vec<PathBuf>, CliError> {
    let stem = record.target.clone().unwrap_or_else(|| record.command.clone());
    let mut written = Vec::new();
    if format == "json" || format == "both" {
        let path = out.join(format!("{stem}.json"));
        write_atomic(&path, &to_json(record)?)?;
        written.push(path);
    }
    if format == "csv" || format == "both" {
        let path = out.join(format!("{stem}.csv"));
        write_atomic(&path, &to_csv(record)?)?;
        written.push(path);
    }
    Ok(written)
}
