//! Report rendering: JSON objects tagged with a schema version, CSV tables,
//! and 15-significant-digit numbers in both.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::Result;

pub const JSON_SCHEMA: u64 = 1;

/// Rounds to 15 significant digits; non-finite values pass through.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.14e}").parse().unwrap_or(v)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON of `fields` (an object) with `"schema": 1` and `"command"`
/// added, numbers rounded.
pub(crate) fn json_report(command: &str, fields: Value) -> String {
    let mut map = match fields {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    map.insert("schema".into(), Value::from(JSON_SCHEMA));
    map.insert("command".into(), Value::from(command));
    let mut v = Value::Object(map);
    round_value(&mut v);
    let mut text = serde_json::to_string_pretty(&v).expect("JSON values always serialise");
    text.push('\n');
    text
}

pub(crate) fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialise to JSON")
}

/// A CSV cell for a number: 15 significant digits, `NaN` for NaN, empty
/// for a missing value.
pub(crate) fn num(v: f64) -> String {
    let v = round_sig(v);
    if v.is_nan() {
        "NaN".into()
    } else if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub(crate) fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub(crate) fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| crate::cli::invalid(format!("CSV output: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::cli::invalid(format!("CSV output: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields is UTF-8"))
}
