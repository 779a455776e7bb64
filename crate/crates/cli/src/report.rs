use std::fmt;
use std::io::Write;
use std::path::Path;

use discord_witness::{io, Error};
use serde::Serialize;
use serde_json::Value;

use crate::args::Format;

/// Maximum gap between witness routes before a run is flagged.
pub const ROUTE_GAP_LIMIT: f64 = 1e-6;

/// A number together with the route or oracle that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct Tagged {
    pub value: f64,
    pub source: &'static str,
}

pub fn tagged(value: f64, source: &'static str) -> Tagged {
    Tagged { value, source }
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    RouteDisagreement { gap: f64 },
    Output(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::RouteDisagreement { gap } => {
                write!(f, "witness routes disagree by {gap:.3e} (limit {ROUTE_GAP_LIMIT:e})")
            }
            CliError::Output(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    /// 3 parse, 4 validation, 5 route disagreement, 6 optimizer failure,
    /// 1 anything else. Usage errors exit with 2 from the argument parser.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Parse { .. }) => 3,
            CliError::Core(
                Error::DimensionMismatch(_)
                | Error::NotHermitian { .. }
                | Error::NotPositive { .. }
                | Error::TraceNotOne { .. }
                | Error::NonFinite { .. }
                | Error::NotDensityMatrix(_)
                | Error::NotUnitary { .. },
            ) => 4,
            CliError::RouteDisagreement { .. } => 5,
            CliError::Core(Error::DidNotConverge { .. }) => 6,
            _ => 1,
        }
    }
}

/// What a command produced. A report can carry a failure that is signalled
/// through the exit code after the report has been written.
pub enum Output {
    Document { value: Value, failure: Option<CliError> },
    Text(String),
}

pub fn document<T: Serialize>(report: &T) -> Value {
    serde_json::to_value(report).expect("reports serialize to JSON")
}

fn format_number(n: &serde_json::Number) -> String {
    match n.as_f64() {
        Some(x) if !(n.is_i64() || n.is_u64()) => format!("{x:.16e}"),
        _ => n.to_string(),
    }
}

/// Flattens a JSON document into `key,value` rows with dotted keys.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, rows)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, rows)),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => rows.push((prefix.to_string(), format_number(n))),
        Value::String(s) => rows.push((prefix.to_string(), csv_field(s))),
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => io::to_json_pretty(value) + "\n",
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", value, &mut rows);
            let mut out = String::from("key,value\n");
            for (k, v) in rows {
                out.push_str(&format!("{k},{v}\n"));
            }
            out
        }
    }
}

pub fn write_output(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Output(format!("cannot write to stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_flattening() {
        let v = serde_json::json!({"a": {"b": 0.5, "c": [1, 2]}, "name": "x,y", "none": null});
        let text = render(&v, Format::Csv);
        assert_eq!(text, "key,value\na.b,5.0000000000000000e-1\na.c.0,1\na.c.1,2\nname,\"x,y\"\nnone,\n");
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            CliError::Core(Error::Parse { line: 1, column: 1, message: String::new() }).exit_code(),
            CliError::Core(Error::NotHermitian { deviation: 1.0 }).exit_code(),
            CliError::RouteDisagreement { gap: 1.0 }.exit_code(),
            CliError::Core(Error::DidNotConverge { restarts: 1, best: 0.0 }).exit_code(),
            CliError::Core(Error::InvalidParameter(String::new())).exit_code(),
        ];
        assert_eq!(codes, [3, 4, 5, 6, 1]);
    }
}
