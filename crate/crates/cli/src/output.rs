//! Report and table writers.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "OBSLAB_OUTPUT_DIR";

/// A CSV table held as strings so rows format identically on every run.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Formats a float for tables; non-finite values become `inf` or `nan`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x}")
    }
}

pub fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Output directory: flag or config value, then the environment, then
/// `obslab-out`.
pub fn output_dir(config: &ExperimentConfig) -> PathBuf {
    config
        .run
        .output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("obslab-out"))
}

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a ExperimentConfig,
    pass: bool,
    result: &'a R,
}

/// Writes `<dir>/<command>.json` and `<dir>/<command>.csv`.
pub fn write_reports<R: Serialize>(
    dir: &Path,
    command: &str,
    config: &ExperimentConfig,
    pass: bool,
    result: &R,
    table: &Table,
) -> Result<(PathBuf, PathBuf), CliError> {
    let io = |e: std::io::Error| CliError::usage(format!("cannot write to {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let envelope = Envelope {
        tool: "obslab",
        version: obslab::VERSION,
        command,
        config,
        pass,
        result,
    };
    let mut json = serde_json::to_string_pretty(&envelope).map_err(|e| CliError::usage(e.to_string()))?;
    json.push('\n');
    let json_path = dir.join(format!("{command}.json"));
    std::fs::write(&json_path, json).map_err(io)?;

    let csv_path = dir.join(format!("{command}.csv"));
    let mut writer = csv::Writer::from_path(&csv_path).map_err(|e| CliError::usage(e.to_string()))?;
    writer.write_record(&table.header).map_err(|e| CliError::usage(e.to_string()))?;
    for row in &table.rows {
        writer.write_record(row).map_err(|e| CliError::usage(e.to_string()))?;
    }
    writer.flush().map_err(io)?;
    Ok((json_path, csv_path))
}
