//! Report rendering: one JSON record per line, or a CSV projection of the
//! body rows. Floats are rounded to 12 significant digits.

use std::collections::BTreeSet;

use serde_json::{Map, Number, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Records,
    Csv,
}

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_float(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v).parse().unwrap_or(v)
}

/// Rounds every float inside a JSON value.
pub fn rounded(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let v = round_float(n.as_f64().unwrap_or(f64::NAN));
            Number::from_f64(v).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(rounded).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

/// Merges `extra` into an object, keeping existing keys.
pub fn with_fields(base: &Map<String, Value>, extra: Value) -> Value {
    let mut out = base.clone();
    match extra {
        Value::Object(map) => {
            for (k, v) in map {
                out.entry(k).or_insert(v);
            }
        }
        other => {
            out.insert("value".into(), other);
        }
    }
    Value::Object(out)
}

pub fn render(header: Option<&Value>, rows: &[Value], format: Format) -> Result<String, CliError> {
    match format {
        Format::Records => {
            let mut out = String::new();
            for v in header.into_iter().chain(rows) {
                out.push_str(&serde_json::to_string(&rounded(v.clone())).map_err(|e| CliError::Io(e.to_string()))?);
                out.push('\n');
            }
            Ok(out)
        }
        Format::Csv => csv_projection(rows),
    }
}

fn csv_projection(rows: &[Value]) -> Result<String, CliError> {
    let rows: Vec<Value> = rows.iter().cloned().map(rounded).collect();
    let columns: BTreeSet<String> = rows
        .iter()
        .filter_map(Value::as_object)
        .flat_map(|m| m.keys().cloned())
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(&columns).map_err(io)?;
    for row in &rows {
        let cells = columns.iter().map(|c| match row.get(c) {
            None | Some(Value::Null) => String::new(),
            Some(Value::String(s)) => s.clone(),
            Some(v) => v.to_string(),
        });
        w.write_record(cells).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}
