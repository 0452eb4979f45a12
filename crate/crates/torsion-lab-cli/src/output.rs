use crate::args::Format;
use crate::CliError;
use serde_json::{Map, Value};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Flag(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

/// Scientific notation with 17 significant digits.
pub fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    fn csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(CliError::io)?;
        for row in &self.rows {
            let rec: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => number(*v),
                    Cell::Text(s) => s.clone(),
                    Cell::Flag(b) => b.to_string(),
                })
                .collect();
            w.write_record(&rec).map_err(CliError::io)?;
        }
        w.into_inner().map_err(|e| CliError::io(e.into_error()))
    }

    fn json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (k, c) in self.header.iter().zip(row) {
                    let v = match c {
                        Cell::Num(v) => serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
                        Cell::Text(s) => Value::String(s.clone()),
                        Cell::Flag(b) => Value::Bool(*b),
                    };
                    m.insert(k.clone(), v);
                }
                Value::Object(m)
            })
            .collect();
        Value::Array(rows)
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => json_bytes(&self.json()),
        }
    }
}

pub fn json_bytes<T: serde::Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(v).map_err(|e| CliError::Config(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}

/// Writes to `path` through a sibling temporary file, or to stdout.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).map_err(CliError::io)?;
            out.flush().map_err(CliError::io)
        }
        Some(p) => {
            let tmp = partial_path(p);
            let res = fs::write(&tmp, bytes).and_then(|_| fs::rename(&tmp, p));
            if res.is_err() {
                let _ = fs::remove_file(&tmp);
            }
            res.map_err(CliError::io)
        }
    }
}
