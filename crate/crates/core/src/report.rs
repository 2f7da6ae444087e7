//! CSV/JSON output with columns `case,N,value,error,iterations,wall_time_s`.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{Map, Number, Value};

use crate::bench::{ConvergenceRecord, ParityMode, TableRow};
use crate::error::{Error, Result};

pub const COLUMNS: [&str; 6] = ["case", "N", "value", "error", "iterations", "wall_time_s"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub case: String,
    pub n: usize,
    pub value: Option<f64>,
    pub error: Option<f64>,
    pub iterations: Option<usize>,
    pub wall_time_s: Option<f64>,
}

impl ReportRow {
    pub fn from_convergence(r: &ConvergenceRecord) -> Self {
        let case = match r.parity_mode {
            ParityMode::Full => r.case.id().to_string(),
            ParityMode::Restricted => format!("{}-parity", r.case.id()),
        };
        Self {
            case,
            n: r.n,
            value: None,
            error: Some(r.max_norm_error),
            iterations: None,
            wall_time_s: Some(r.wall_time),
        }
    }

    pub fn from_table(ksq: f64, row: &TableRow) -> Self {
        Self {
            case: format!("table3d_k{ksq}"),
            n: row.n,
            value: Some(row.energy),
            error: None,
            iterations: Some(row.report.iterations),
            wall_time_s: Some(row.report.wall_time),
        }
    }

    pub fn without_timing(mut self) -> Self {
        self.wall_time_s = None;
        self
    }
}

/// Ten digits after the point for moderate magnitudes (the precision of the
/// reference energies), ten significant digits in exponent form otherwise.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = v.abs();
    if v == 0.0 || (1e-3..1e5).contains(&a) {
        format!("{v:.10}")
    } else {
        format!("{v:.9e}")
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

fn json_number(v: Option<f64>) -> Value {
    // Parse back the printed text so JSON and CSV carry the same digits.
    v.and_then(|x| format_number(x).parse::<f64>().ok()).and_then(Number::from_f64).map_or(Value::Null, Value::Number)
}

pub fn to_csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialize(e.to_string());
    w.write_record(COLUMNS).map_err(ser)?;
    for r in rows {
        w.write_record([
            r.case.clone(),
            r.n.to_string(),
            cell(r.value),
            cell(r.error),
            r.iterations.map(|i| i.to_string()).unwrap_or_default(),
            cell(r.wall_time_s),
        ])
        .map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

pub fn to_json(rows: &[ReportRow]) -> Result<String> {
    let arr: Vec<Value> = rows
        .iter()
        .map(|r| {
            let mut o = Map::new();
            o.insert("case".into(), Value::String(r.case.clone()));
            o.insert("N".into(), Value::from(r.n));
            o.insert("value".into(), json_number(r.value));
            o.insert("error".into(), json_number(r.error));
            o.insert("iterations".into(), r.iterations.map_or(Value::Null, Value::from));
            o.insert("wall_time_s".into(), json_number(r.wall_time_s));
            Value::Object(o)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&Value::Array(arr)).map_err(|e| Error::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes to `destination`, or standard output when it is `None`.
pub fn emit_report(rows: &[ReportRow], format: Format, destination: Option<&Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    let text = match format {
        Format::Csv => to_csv(rows)?,
        Format::Json => to_json(rows)?,
    };
    match destination {
        Some(path) => {
            let io_err = |source: io::Error| Error::Io { path: path.to_path_buf(), source };
            let mut f = File::create(path).map_err(io_err)?;
            f.write_all(text.as_bytes()).map_err(io_err)?;
        }
        None => {
            let stdout = PathBuf::from("<stdout>");
            io::stdout().lock().write_all(text.as_bytes()).map_err(|source| Error::Io { path: stdout, source })?;
        }
    }
    Ok(())
}
