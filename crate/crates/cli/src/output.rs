//! Result files. Every file carries a metadata block: a `#` comment header
//! in CSV, a `metadata` object in JSON. No timestamps, so identical inputs
//! give identical bytes.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, Result};

pub const ARTIFACT_NAME: &str = env!("CARGO_PKG_NAME");
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub artifact: String,
    pub version: String,
    pub generator: String,
    pub seed: u64,
    pub task: String,
    pub config: Value,
}

impl Metadata {
    pub fn new(task: &str, seed: u64, config: Value) -> Self {
        Self {
            artifact: ARTIFACT_NAME.to_owned(),
            version: ARTIFACT_VERSION.to_owned(),
            generator: qdist_core::GENERATOR_NAME.to_owned(),
            seed,
            task: task.to_owned(),
            config,
        }
    }
}

/// Header plus string cells; numbers are formatted by the caller.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip formatting.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Vectors as `(a; b; c)` so they sit in a single CSV cell.
pub fn vector_cell(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| num(*x)).collect();
    format!("({})", parts.join("; "))
}

pub fn render_csv(meta: &Metadata, table: &CsvTable) -> Result<String> {
    let mut out = String::new();
    out.push_str(&format!("# artifact: {} {}\n", meta.artifact, meta.version));
    out.push_str(&format!("# generator: {}\n", meta.generator));
    out.push_str(&format!("# seed: {}\n", meta.seed));
    out.push_str(&format!("# task: {}\n", meta.task));
    out.push_str(&format!("# config: {}\n", meta.config));
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(format!("csv encoding failed: {e}"));
    w.write_record(&table.header).map_err(csv_err)?;
    for r in &table.rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
    Ok(out)
}

pub fn render_summary(meta: &Metadata, body: Value) -> String {
    let mut doc = json!({ "metadata": meta });
    if let (Value::Object(dst), Value::Object(src)) = (&mut doc, body) {
        dst.extend(src);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("summary serializes");
    s.push('\n');
    s
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Metadata {
        Metadata::new("table1", 4, json!({"estimator": {"seed": 4}}))
    }

    #[test]
    fn csv_starts_with_metadata_then_header() {
        let mut t = CsvTable::new(&["index", "vector"]);
        t.push(vec!["1".into(), vector_cell(&[0.5, -2.0])]);
        let s = render_csv(&meta(), &t).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# artifact: qdist-cli "));
        assert!(lines[1].contains("ChaCha8Rng"));
        assert_eq!(lines[2], "# seed: 4");
        assert_eq!(lines[5], "index,vector");
        assert_eq!(lines[6], "1,(0.5; -2)");
    }

    #[test]
    fn summary_keys_are_sorted_and_metadata_included() {
        let s = render_summary(&meta(), json!({"zeta": 1, "alpha": 2}));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["metadata"]["seed"], 4);
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
    }
}
