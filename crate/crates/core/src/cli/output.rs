use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::{Format, OutputSpec};
use super::error::CliError;
use crate::sim::{SimulationConfig, SpaceTimeRecord};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            _ => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut write = || -> csv::Result<()> {
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
            w.flush()?;
            Ok(())
        };
        write().expect("writing to memory cannot fail");
        String::from_utf8(w.into_inner().expect("flushed")).expect("cells are utf-8")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Data plus the metadata needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub table: Table,
    pub metadata: Value,
}

impl Output {
    pub fn document(&self) -> Value {
        let mut doc = self.table.to_json();
        doc["metadata"] = self.metadata.clone();
        doc
    }
}

/// Metadata file written next to a CSV: `run.csv` → `run.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes `output` per `spec`. Without a path the JSON document is returned
/// for stdout.
pub fn write_output(output: &Output, spec: &OutputSpec) -> Result<Option<String>, CliError> {
    let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("json values serialize");
    match (&spec.path, spec.format) {
        (None, Format::Json) => Ok(Some(pretty(&output.document()))),
        (None, Format::Csv) => Err(CliError::config("csv output needs --out")),
        (Some(path), Format::Json) => {
            write_file(path, &pretty(&output.document()))?;
            Ok(None)
        }
        (Some(path), Format::Csv) => {
            write_file(path, &output.table.to_csv())?;
            write_file(&sidecar_path(path), &pretty(&output.metadata))?;
            Ok(None)
        }
    }
}

/// Curve table with gaps listed in the metadata only.
pub fn write_curve(output: &Output, spec: &OutputSpec) -> Result<Option<String>, CliError> {
    write_output(output, spec)
}

/// Record table: column `time` then `v0 .. v{N-1}`; `x`, parameters and
/// configuration go to the metadata.
pub fn record_output(record: &SpaceTimeRecord, extra: Value) -> Output {
    let mut columns = vec!["time".to_string()];
    columns.extend((0..record.x.len()).map(|j| format!("v{j}")));
    let rows = record
        .times
        .iter()
        .zip(&record.values)
        .map(|(&t, row)| std::iter::once(Cell::Num(t)).chain(row.iter().map(|&v| Cell::Num(v))).collect())
        .collect();
    let mut metadata = json!({
        "kind": "record",
        "params": record.params,
        "config": record.config,
        "effective_k": record.effective_k,
        "x": record.x,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut metadata, extra) {
        m.extend(e);
    }
    Output {
        table: Table { columns, rows },
        metadata,
    }
}

pub fn write_record(record: &SpaceTimeRecord, extra: Value, spec: &OutputSpec) -> Result<Option<String>, CliError> {
    write_output(&record_output(record, extra), spec)
}

fn field<T: serde::de::DeserializeOwned>(meta: &Value, key: &str, path: &Path) -> Result<T, CliError> {
    serde_json::from_value(meta[key].clone()).map_err(|e| CliError::io(path, format!("metadata field {key}: {e}")))
}

/// Reads a record written as CSV plus sidecar.
pub fn read_record(csv_path: &Path) -> Result<SpaceTimeRecord, CliError> {
    let meta_path = sidecar_path(csv_path);
    let meta_text = fs::read_to_string(&meta_path).map_err(|e| CliError::io(&meta_path, e))?;
    let meta: Value = serde_json::from_str(&meta_text).map_err(|e| CliError::io(&meta_path, e))?;
    let config: SimulationConfig = field(&meta, "config", &meta_path)?;
    let mut record = SpaceTimeRecord {
        params: field(&meta, "params", &meta_path)?,
        effective_k: field(&meta, "effective_k", &meta_path)?,
        x: field(&meta, "x", &meta_path)?,
        config,
        times: Vec::new(),
        values: Vec::new(),
    };
    let mut reader = csv::Reader::from_path(csv_path).map_err(|e| CliError::io(csv_path, e))?;
    for (i, row) in reader.deserialize::<Vec<f64>>().enumerate() {
        let nums = row.map_err(|e| CliError::io(csv_path, e))?;
        if nums.len() != record.x.len() + 1 {
            return Err(CliError::io(
                csv_path,
                format!("row {}: {} columns for {} grid points", i + 1, nums.len(), record.x.len()),
            ));
        }
        record.times.push(nums[0]);
        record.values.push(nums[1..].to_vec());
    }
    Ok(record)
}
