//! Deterministic experiment runner behind the `hubbard-scatter` binary.

pub mod config;
mod points;
pub mod selftest;

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use serde_json::json;

use crate::error::Error;
pub use config::{ConfigError, ExperimentConfig, ExperimentKind};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Sign conventions recorded with every output.
pub const CONVENTION: &str = "v(k) = +2 kappa sin k; v_rel = v_R - v_L; theta = 2 atan(U / v_rel)";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numeric contract violated: {0}")]
    Numeric(Error),
    #[error("output error: {0}")]
    Io(#[from] io::Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSector(_) | Error::InvalidParameter { .. } | Error::EmptySector(_) | Error::Schedule(_) => {
                RunError::Config(ConfigError::new("config", e.to_string()))
            }
            other => RunError::Numeric(other),
        }
    }
}

impl RunError {
    /// `1` for configuration and output problems, `2` for numeric-contract violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 1,
            RunError::Numeric(_) => 2,
        }
    }
}

/// Named columns of `f64` rows.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    fn write_csv<W: Write>(&self, header: &[String], w: W) -> io::Result<()> {
        let mut w = io::BufWriter::new(w);
        for line in header {
            writeln!(w, "# {line}")?;
        }
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.columns)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(|x| format!("{x:e}")))?;
        }
        csv.flush()
    }
}

/// Outcome of one grid point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointResult {
    pub summary: Vec<(String, f64)>,
    /// Time curve; the first column is `t`.
    pub curve: Option<Table>,
    /// Long-format rows, concatenated across points behind the point labels.
    pub details: Option<Table>,
}

/// Aggregated result of a config.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub summary: Table,
    pub curves: Option<Table>,
    pub details: Option<Table>,
}

fn format_label(cfg: &ExperimentConfig) -> String {
    cfg.point_label().iter().map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(",")
}

/// Run every grid point of `config` on up to `workers` threads; the result
/// does not depend on `workers`.
pub fn execute(config: &ExperimentConfig, workers: usize) -> Result<RunResult, RunError> {
    config.validate()?;
    let points = config.expand()?;
    let run_all = || points.par_iter().map(points::run_point).collect::<Vec<Result<PointResult, RunError>>>();
    let results = if workers <= 1 {
        points.iter().map(points::run_point).collect::<Vec<_>>()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers.min(points.len()).max(1))
            .build()
            .map_err(|e| RunError::Io(io::Error::other(e)))?
            .install(run_all)
    };
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let axes = config.axis_names();
    let mut summary = Table { columns: axes.iter().map(|a| a.key().to_string()).collect(), rows: Vec::new() };
    if let Some(first) = results.first() {
        summary.columns.extend(first.summary.iter().map(|(k, _)| k.clone()));
    }
    for (p, r) in points.iter().zip(&results) {
        let mut row: Vec<f64> = p.point_label().iter().map(|&(_, v)| v).collect();
        row.extend(r.summary.iter().map(|&(_, v)| v));
        summary.rows.push(row);
    }

    let curves = if results.iter().all(|r| r.curve.is_some()) && !results.is_empty() {
        let base = results[0].curve.as_ref().unwrap();
        let mut table = Table { columns: vec!["t".into()], rows: base.rows.iter().map(|r| vec![r[0]]).collect() };
        for (p, r) in points.iter().zip(&results) {
            let c = r.curve.as_ref().unwrap();
            let label = format_label(p);
            for (j, name) in c.columns.iter().enumerate().skip(1) {
                table.columns.push(if points.len() == 1 { name.clone() } else { format!("{name}[{label}]") });
                for (row, src) in table.rows.iter_mut().zip(&c.rows) {
                    row.push(src[j]);
                }
            }
        }
        Some(table)
    } else {
        None
    };
    let details = match results.first().and_then(|r| r.details.as_ref()) {
        Some(first) => {
            let mut table = Table { columns: axes.iter().map(|a| a.key().to_string()).collect(), rows: Vec::new() };
            table.columns.extend(first.columns.iter().cloned());
            for (p, r) in points.iter().zip(&results) {
                let label: Vec<f64> = p.point_label().iter().map(|&(_, v)| v).collect();
                for row in r.details.as_ref().map(|d| d.rows.as_slice()).unwrap_or_default() {
                    table.rows.push(label.iter().chain(row).copied().collect());
                }
            }
            Some(table)
        }
        None => None,
    };
    Ok(RunResult { config: config.clone(), summary, curves, details })
}

fn header(result: &RunResult) -> Vec<String> {
    vec![
        format!("hubbard-scatter {VERSION}"),
        format!("experiment: {}", result.config.experiment.name()),
        format!("config_sha256: {}", result.config.hash()),
        format!("convention: {CONVENTION}"),
    ]
}

/// Write `summary.csv`, `metadata.json`, and `curves.csv` / `details.csv`
/// when the experiment produces them, into `dir`.
pub fn write_outputs(result: &RunResult, dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir)?;
    let head = header(result);
    result.summary.write_csv(&head, fs::File::create(dir.join("summary.csv"))?)?;
    if let Some(c) = &result.curves {
        c.write_csv(&head, fs::File::create(dir.join("curves.csv"))?)?;
    }
    if let Some(d) = &result.details {
        d.write_csv(&head, fs::File::create(dir.join("details.csv"))?)?;
    }
    let rows: Vec<serde_json::Value> = result
        .summary
        .rows
        .iter()
        .map(|r| serde_json::Value::Object(result.summary.columns.iter().cloned().zip(r.iter().map(|&x| json!(x))).collect()))
        .collect();
    let meta = json!({
        "artifact": "hubbard-scatter",
        "version": VERSION,
        "experiment": result.config.experiment.name(),
        "config_sha256": result.config.hash(),
        "convention": CONVENTION,
        "config": result.config,
        "points": rows,
    });
    let mut text = serde_json::to_string_pretty(&meta).map_err(|e| RunError::Io(io::Error::other(e)))?;
    text.push('\n');
    fs::write(dir.join("metadata.json"), text)?;
    Ok(())
}

/// Load a TOML config from disk.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, RunError> {
    let text = fs::read_to_string(path)
        .map_err(|e| RunError::Config(ConfigError::new(path.display().to_string(), e.to_string())))?;
    Ok(ExperimentConfig::from_toml_str(&text)?)
}
