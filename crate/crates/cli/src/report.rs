//! CSV/JSON artifacts with a fixed column order and 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Number, Value};

use crate::config::Format;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("no records to emit")]
    EmptyRecords,
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(if b { "pass" } else { "fail" }.into())
    }
}

/// One row of an artifact table.
pub trait Record {
    fn columns() -> Vec<&'static str>;
    fn cells(&self) -> Vec<Cell>;
}

/// `{:.16e}`: one digit before the point and sixteen after.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number carrying exactly the text of [`format_float`]; `null` if not finite.
pub fn json_float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let n: Number = format_float(x).parse().expect("formatted float is a JSON number");
    Value::Number(n)
}

pub fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Float(x) => json_float(*x),
        Cell::Int(i) => Value::from(*i),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Missing => Value::Null,
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Float(x) if x.is_nan() => "NaN".into(),
        Cell::Float(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
        Cell::Float(x) => format_float(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
        Cell::Missing => String::new(),
    }
}

pub fn to_csv<R: Record>(records: &[R]) -> Result<String, ReportError> {
    if records.is_empty() {
        return Err(ReportError::EmptyRecords);
    }
    let mut out = R::columns().join(",");
    out.push('\n');
    for r in records {
        let row: Vec<String> = r.cells().iter().map(csv_cell).collect();
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    Ok(out)
}

pub fn to_json_value<R: Record>(records: &[R]) -> Value {
    let cols = R::columns();
    Value::Array(
        records
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (k, v) in cols.iter().zip(r.cells()) {
                    m.insert(k.to_string(), json_cell(&v));
                }
                Value::Object(m)
            })
            .collect(),
    )
}

pub fn to_json<R: Record>(records: &[R]) -> Result<String, ReportError> {
    if records.is_empty() {
        return Err(ReportError::EmptyRecords);
    }
    Ok(pretty(&to_json_value(records)))
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, text: &str) -> Result<(), ReportError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| ReportError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `dir/stem.csv` or `dir/stem.json`, returning the path.
pub fn emit_report<R: Record>(records: &[R], format: Format, dir: &Path, stem: &str) -> Result<PathBuf, ReportError> {
    let (text, ext) = match format {
        Format::Csv => (to_csv(records)?, "csv"),
        Format::Json => (to_json(records)?, "json"),
    };
    let path = dir.join(format!("{stem}.{ext}"));
    write_file(&path, &text)?;
    Ok(path)
}
