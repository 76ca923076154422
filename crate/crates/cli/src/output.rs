use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::{CliError, Format};

/// Column-named table of floats, written as CSV or JSON.
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Twelve significant digits.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        v.to_string()
    }
}

fn rounded(v: f64) -> Value {
    fmt_num(v).parse::<f64>().map(Value::from).unwrap_or(Value::Null)
}

pub fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Writes `table` into `dir` with the command and configuration echoed in the header.
pub fn write_table<C: Serialize>(
    dir: &Path,
    table: &Table,
    command: &str,
    config: &C,
    format: Format,
) -> Result<PathBuf, CliError> {
    let config = serde_json::to_value(config).map_err(|e| CliError::Io(e.to_string()))?;
    match format {
        Format::Csv => {
            let path = dir.join(format!("{}.csv", table.name));
            let mut buf = format!("# couplecrack {command} {}\n# config {config}\n", table.name).into_bytes();
            {
                let mut w = csv::Writer::from_writer(&mut buf);
                let io = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(&table.columns).map_err(io)?;
                for row in &table.rows {
                    w.write_record(row.iter().map(|v| fmt_num(*v))).map_err(io)?;
                }
                w.flush().map_err(|e| CliError::Io(e.to_string()))?;
            }
            write_file(&path, &buf)?;
            Ok(path)
        }
        Format::Json => {
            let path = dir.join(format!("{}.json", table.name));
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(|v| rounded(*v)).collect()))
                .collect();
            let doc = json!({
                "command": command,
                "table": table.name,
                "config": config,
                "columns": table.columns,
                "rows": rows,
            });
            write_json(&path, &doc)?;
            Ok(path)
        }
    }
}

/// Writes a summary record; floats are rounded to twelve significant digits.
pub fn write_summary<C: Serialize>(
    dir: &Path,
    name: &str,
    command: &str,
    config: &C,
    fields: Value,
) -> Result<PathBuf, CliError> {
    let config = serde_json::to_value(config).map_err(|e| CliError::Io(e.to_string()))?;
    let doc = json!({ "command": command, "config": config, "summary": round_all(fields) });
    let path = dir.join(format!("{name}.json"));
    write_json(&path, &doc)?;
    Ok(path)
}

fn round_all(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => rounded(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(round_all).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_all(v))).collect()),
        other => other,
    }
}

fn write_json(path: &Path, doc: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_file(path, text.as_bytes())
}
