//! Reproducible experiment output: a `#`-prefixed header block recording
//! the tool version, the effective config, the rng seed and the
//! exhaustive/sampled flags, followed by a CSV table (or its JSON mirror).
//! Re-running with the same config reproduces the data section byte for
//! byte; only the timestamp line varies.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

/// Header-block metadata; every number in the data section must be
/// reproducible from it.
#[derive(Debug, Clone)]
pub struct RunMeta {
    pub config: String,
    pub seed: u64,
    /// Extra flag lines such as ("exhaustive", "true").
    pub flags: Vec<(String, String)>,
}

impl RunMeta {
    pub fn new(config: impl Into<String>, seed: u64) -> Self {
        Self {
            config: config.into(),
            seed,
            flags: Vec::new(),
        }
    }

    pub fn flag(mut self, key: &str, value: impl ToString) -> Self {
        self.flags.push((key.to_string(), value.to_string()));
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width matches header");
        self.rows.push(row);
    }
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn render_csv(meta: &RunMeta, table: &Table) -> String {
    let mut out = String::new();
    out.push_str(&format!("# tool: matrig {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("# timestamp: {}\n", timestamp()));
    out.push_str(&format!("# config: {}\n", meta.config));
    out.push_str(&format!("# seed: {}\n", meta.seed));
    for (k, v) in &meta.flags {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(meta: &RunMeta, table: &Table) -> String {
    use serde_json::{json, Map, Value};
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (col, val) in table.columns.iter().zip(row) {
                obj.insert(col.clone(), Value::String(val.clone()));
            }
            Value::Object(obj)
        })
        .collect();
    let mut flags = Map::new();
    for (k, v) in &meta.flags {
        flags.insert(k.clone(), Value::String(v.clone()));
    }
    let doc = json!({
        "tool": format!("matrig {}", env!("CARGO_PKG_VERSION")),
        "timestamp": timestamp(),
        "config": meta.config,
        "seed": meta.seed,
        "flags": Value::Object(flags),
        "columns": table.columns,
        "rows": rows,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("string-only values");
    text.push('\n');
    text
}

/// Write to the path, or stdout when no path is given.
pub fn emit(
    path: Option<&Path>,
    format: OutputFormat,
    meta: &RunMeta,
    table: &Table,
) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => render_csv(meta, table),
        OutputFormat::Json => render_json(meta, table),
    };
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing stdout")?,
    }
    Ok(())
}

/// Stable float rendering for table cells: plain shortest-roundtrip digits
/// in a moderate range, scientific notation outside it.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-4 && v.abs() < 1e16) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Drop the timestamp line/field for determinism comparisons.
pub fn strip_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| {
            !l.trim_start().starts_with("# timestamp:")
                && !l.trim_start().starts_with("\"timestamp\"")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let meta = RunMeta::new("rank --in x.mat", 0).flag("exhaustive", true);
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        let text = render_csv(&meta, &t);
        assert!(text.contains("# config: rank --in x.mat\n"));
        assert!(text.contains("# exhaustive: true\n"));
        assert!(text.ends_with("a,b\n1,2\n"));
        let stripped = strip_timestamp(&text);
        assert!(!stripped.contains("timestamp"));
    }

    #[test]
    fn json_mirrors_rows() {
        let meta = RunMeta::new("c", 7);
        let mut t = Table::new(&["x"]);
        t.push(vec!["v".into()]);
        let text = render_json(&meta, &t);
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["rows"][0]["x"], "v");
        assert_eq!(doc["seed"], 7);
    }
}
