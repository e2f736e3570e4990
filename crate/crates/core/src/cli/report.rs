use std::io::Write;
use std::path::Path;
use std::time::Duration;

use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::rational::to_f64;

pub const SCHEMA: &str = "xscore/1";

/// Machine-readable result of one run.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: Tool,
    pub command: String,
    pub config: Value,
    pub records: Vec<Value>,
    pub warnings: Vec<String>,
    pub timing: Timing,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            schema: SCHEMA,
            tool: Tool {
                name: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
            },
            command: command.to_string(),
            config,
            records: Vec::new(),
            warnings: Vec::new(),
            timing: Timing { elapsed_ms: 0.0 },
        }
    }

    pub fn set_elapsed(&mut self, d: Duration) {
        self.timing.elapsed_ms = d.as_secs_f64() * 1e3;
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per record with the fields that identify and value it.
    pub fn to_table(&self) -> String {
        let cols = ["kind", "tuple", "fact", "feature", "value", "decimal"];
        let mut rows: Vec<Vec<String>> = Vec::new();
        for r in &self.records {
            let Value::Object(m) = r else { continue };
            if m.contains_key("value") || m.contains_key("decimal") {
                rows.push(cols.iter().map(|c| cell(m.get(*c))).collect());
            } else {
                rows.push(
                    m.iter()
                        .map(|(k, v)| format!("{k}={}", cell(Some(v))))
                        .collect(),
                );
            }
        }
        let used: Vec<usize> = (0..cols.len())
            .filter(|&i| {
                rows.iter()
                    .any(|r| r.len() == cols.len() && !r[i].is_empty())
            })
            .collect();
        let widths: Vec<usize> = used
            .iter()
            .map(|&i| {
                rows.iter()
                    .filter(|r| r.len() == cols.len())
                    .map(|r| r[i].len())
                    .chain([cols[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        if !used.is_empty() {
            let header: Vec<String> = used
                .iter()
                .zip(&widths)
                .map(|(&i, &w)| format!("{:w$}", cols[i]))
                .collect();
            out.push_str(header.join("  ").trim_end());
            out.push('\n');
        }
        for r in &rows {
            let line = if r.len() == cols.len() {
                used.iter()
                    .zip(&widths)
                    .map(|(&i, &w)| format!("{:w$}", r[i]))
                    .collect::<Vec<_>>()
                    .join("  ")
            } else {
                r.join("  ")
            };
            out.push_str(line.trim_end());
            out.push('\n');
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

/// Adds `"value"` as `"p/q"` text and `"decimal"` as its float approximation.
pub fn put_rational(m: &mut Map<String, Value>, r: &BigRational) {
    m.insert("value".into(), json!(r.to_string()));
    m.insert("decimal".into(), json!(to_f64(r)));
}

/// Writes `text` to `path` through a temporary file in the same directory,
/// so readers never observe a partial report.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
