//! Run reports recomputed from the emitted tables, plots and the manifest.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ScenarioConfig;
use super::csv::CsvTable;
use super::svg::{Plot, Series};
use super::{convergence, divergence, trajectory};
use crate::error::{FilamentError, Result};

/// Where and why a run stopped early.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Halt {
    pub eps: Option<f64>,
    pub t: f64,
    pub message: String,
}

/// Everything a driver produced, before anything touches the disk.
#[derive(Debug, Clone, Default)]
pub struct RunData {
    /// File name and table.
    pub tables: Vec<(String, CsvTable)>,
    /// Label and wall-clock seconds.
    pub timings: Vec<(String, f64)>,
    pub halts: Vec<Halt>,
    /// Per-ε failures that did not stop the sweep.
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, value: f64, ok: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), value, ok, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub schema: String,
    pub rows: usize,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: String,
    pub output_dir: PathBuf,
    pub config_hash: String,
    /// Per-ε summary rows.
    pub summary: CsvTable,
    /// Least-squares orders fitted on the summary.
    pub fitted: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    pub files: Vec<FileEntry>,
    pub plots: Vec<String>,
    pub timings: Vec<(String, f64)>,
    pub halts: Vec<Halt>,
    pub errors: Vec<String>,
}

impl RunReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn fitted(&self, name: &str) -> Option<f64> {
        self.fitted.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn halted(&self) -> bool {
        !self.halts.is_empty()
    }

    /// Plain-text summary for the terminal.
    pub fn render(&self) -> String {
        let mut out = format!("scenario {} -> {}\n", self.scenario, self.output_dir.display());
        for (name, v) in &self.fitted {
            out.push_str(&format!("  fitted {name}: {v:.4}\n"));
        }
        for c in &self.checks {
            out.push_str(&format!("  [{}] {}: {:.6e} ({})\n", if c.ok { "ok" } else { "FAIL" }, c.name, c.value, c.detail));
        }
        for h in &self.halts {
            out.push_str(&format!("  halted at t = {} (eps {:?}): {}\n", h.t, h.eps, h.message));
        }
        for e in &self.errors {
            out.push_str(&format!("  error: {e}\n"));
        }
        out
    }
}

/// What the per-scenario analysis derives from the tables on disk.
pub(crate) struct Analysis {
    pub summary: CsvTable,
    pub fitted: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    pub plots: Vec<(String, Plot)>,
}

pub(crate) fn io_err(path: &Path, e: std::io::Error) -> FilamentError {
    FilamentError::IoFailure(format!("{}: {e}", path.display()))
}

/// Writes the tables, re-reads them to build the report, then writes the summary,
/// plots, canonical config and manifest.
pub fn emit_outputs(data: &RunData, config: &ScenarioConfig) -> Result<RunReport> {
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for (name, table) in &data.tables {
        table.write(&dir.join(name))?;
    }
    let analysis = match config.scenario.as_str() {
        "convergence" => convergence::analyze(dir, config)?,
        "trajectory" => trajectory::analyze(dir, config)?,
        "divergence" => divergence::analyze(dir, config)?,
        other => return Err(FilamentError::InvalidConfig(format!("unknown scenario '{other}'"))),
    };
    let summary_name = "summary.csv";
    analysis.summary.write(&dir.join(summary_name))?;
    let mut files: Vec<FileEntry> = data
        .tables
        .iter()
        .map(|(name, t)| FileEntry { name: name.clone(), schema: format!("{}/{}", t.schema, t.version), rows: t.rows.len() })
        .collect();
    files.push(FileEntry {
        name: summary_name.into(),
        schema: format!("{}/{}", analysis.summary.schema, analysis.summary.version),
        rows: analysis.summary.rows.len(),
    });
    let mut plots = Vec::new();
    for (name, plot) in &analysis.plots {
        let path = dir.join(name);
        std::fs::write(&path, plot.render()).map_err(|e| io_err(&path, e))?;
        plots.push(name.clone());
    }
    let config_path = dir.join("config.toml");
    std::fs::write(&config_path, config.to_toml()).map_err(|e| io_err(&config_path, e))?;

    let report = RunReport {
        scenario: config.scenario.clone(),
        output_dir: dir.clone(),
        config_hash: config.hash(),
        summary: analysis.summary,
        fitted: analysis.fitted,
        checks: analysis.checks,
        files,
        plots,
        timings: data.timings.clone(),
        halts: data.halts.clone(),
        errors: data.errors.clone(),
    };
    let manifest = serde_json::json!({
        "scenario": report.scenario,
        "config_hash": report.config_hash,
        "seed": config.seed,
        "files": report.files,
        "plots": report.plots,
        "fitted": report.fitted.iter().map(|(n, v)| serde_json::json!({ "name": n, "value": v })).collect::<Vec<_>>(),
        "checks": report.checks,
        "timings_seconds": report.timings.iter().map(|(n, v)| serde_json::json!({ "label": n, "seconds": v })).collect::<Vec<_>>(),
        "halts": report.halts,
        "errors": report.errors,
    });
    let manifest_path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| FilamentError::IoFailure(e.to_string()))?;
    std::fs::write(&manifest_path, text + "\n").map_err(|e| io_err(&manifest_path, e))?;
    Ok(report)
}

/// Reads a table the driver wrote, or `None` if that entry failed.
pub(crate) fn read_optional(dir: &Path, name: &str) -> Result<Option<CsvTable>> {
    let path = dir.join(name);
    if path.exists() {
        CsvTable::read(&path).map(Some)
    } else {
        Ok(None)
    }
}

/// Log-log plot of several summary columns against ε, each annotated with its fitted slope.
pub(crate) fn loglog_plot(title: &str, y_label: &str, summary: &CsvTable, columns: &[&str], fitted: &[(String, f64)]) -> Result<Plot> {
    let eps = summary.column("eps")?;
    let mut series = Vec::new();
    let mut notes = Vec::new();
    for &c in columns {
        let y = summary.column(c)?;
        series.push(Series { label: c.into(), points: eps.iter().copied().zip(y).collect() });
        if let Some((_, v)) = fitted.iter().find(|(n, _)| n == c) {
            notes.push(format!("{c}: slope {v:.3}"));
        }
    }
    Ok(Plot {
        title: title.into(),
        x_label: "eps".into(),
        y_label: y_label.into(),
        log_x: true,
        log_y: true,
        series,
        notes,
    })
}

/// Whether every consecutive value is strictly below the previous one.
pub(crate) fn strictly_decreasing(v: &[f64]) -> bool {
    v.len() >= 2 && v.windows(2).all(|w| w[1] < w[0])
}
