//! Result emission: per-algorithm CSV curves, a combined long-format CSV,
//! tab-separated plot series, and a JSON run manifest that echoes the full
//! sweep spec so any run can be reproduced from its output directory alone.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experiment::{ExperimentSpec, SuccessCurve};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("no curves to emit")]
    EmptyCurves,
    #[error("{path}: malformed CSV at line {line}")]
    MalformedCsv { path: String, line: usize },
    #[error("{path}: {message}")]
    MalformedManifest { path: String, message: String },
}

fn io_err(path: &Path, source: std::io::Error) -> ReportError {
    ReportError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Floats in CSV/TSV output carry 18 significant digits so parsing them back
/// recovers the exact f64.
fn fmt_f64(x: f64) -> String {
    format!("{x:.17e}")
}

pub const CURVE_CSV_HEADER: &str = "sparsity,success_rate,mean_re,mean_iterations";
pub const COMBINED_CSV_HEADER: &str = "algorithm,p,sparsity,success_rate,mean_re,mean_iterations";

/// Writes `curve_<label>.csv` and returns its path.
pub fn write_curve_csv(dir: &Path, curve: &SuccessCurve) -> Result<PathBuf, ReportError> {
    let path = dir.join(format!("curve_{}.csv", curve.label));
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    for point in &curve.points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            point.sparsity,
            fmt_f64(point.success_rate()),
            fmt_f64(point.mean_re),
            fmt_f64(point.mean_iterations),
        ));
    }
    fs::write(&path, out).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// Writes the combined long-format `curves.csv` covering every algorithm.
pub fn write_combined_csv(dir: &Path, curves: &[SuccessCurve]) -> Result<PathBuf, ReportError> {
    let path = dir.join("curves.csv");
    let mut out = String::from(COMBINED_CSV_HEADER);
    out.push('\n');
    for curve in curves {
        for point in &curve.points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                curve.rule,
                fmt_f64(curve.p),
                point.sparsity,
                fmt_f64(point.success_rate()),
                fmt_f64(point.mean_re),
                fmt_f64(point.mean_iterations),
            ));
        }
    }
    fs::write(&path, out).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// Parsed row of a per-algorithm curve CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveCsvRow {
    pub sparsity: usize,
    pub success_rate: f64,
    pub mean_re: f64,
    pub mean_iterations: f64,
}

/// Reads back a per-algorithm curve CSV.
pub fn read_curve_csv(path: &Path) -> Result<Vec<CurveCsvRow>, ReportError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            if line != CURVE_CSV_HEADER {
                return Err(ReportError::MalformedCsv {
                    path: path.display().to_string(),
                    line: 1,
                });
            }
            continue;
       }
        let fields: Vec<&str> = line.split(',').collect();
        let parsed = (|| -> Option<CurveCsvRow> {
            let [k, rate, re, iters] = fields.as_slice() else {
                return None;
            };
            Some(CurveCsvRow {
                sparsity: k.parse().ok()?,
                success_rate: rate.parse().ok()?,
                mean_re: re.parse().ok()?,
                mean_iterations: iters.parse().ok()?,
            })
        })();
        rows.push(parsed.ok_or(ReportError::MalformedCsv {
            path: path.display().to_string(),
            line: lineno + 1,
        })?);
    }
    Ok(rows)
}

/// Writes one `plot_<label>.tsv` per curve (sparsity vs success rate) for
/// generic plotting tools; rejects an empty curve list.
pub fn emit_plot_data(dir: &Path, curves: &[SuccessCurve]) -> Result<Vec<PathBuf>, ReportError> {
    if curves.is_empty() {
        return Err(ReportError::EmptyCurves);
    }
    let mut paths = Vec::with_capacity(curves.len());
    for curve in curves {
        let path = dir.join(format!("plot_{}.tsv", curve.label));
        let mut out = String::from("sparsity\tsuccess_rate\n");
        for point in &curve.points {
            out.push_str(&format!(
                "{}\t{}\n",
                point.sparsity,
                fmt_f64(point.success_rate())
            ));
        }
        fs::write(&path, out).map_err(|e| io_err(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Everything needed to reproduce and audit one sweep: the resolved spec,
/// tool version, wall-clock info, and the aggregated per-cell statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub created_unix_seconds: u64,
    pub runtime_seconds: f64,
    pub spec: ExperimentSpec,
    pub curves: Vec<SuccessCurve>,
}

impl RunManifest {
    pub fn new(spec: ExperimentSpec, curves: Vec<SuccessCurve>, runtime_seconds: f64) -> Self {
        let created_unix_seconds = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            created_unix_seconds,
            runtime_seconds,
            spec,
            curves,
        }
    }
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<PathBuf, ReportError> {
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(&path, json).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

pub fn read_manifest(path: &Path) -> Result<RunManifest, ReportError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| ReportError::MalformedManifest {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Per-algorithm summary: the largest sparsity still recovered with success
/// rate at least 0.9, for the comparison table on stdout.
pub fn summary_table(curves: &[SuccessCurve]) -> String {
    let mut out = String::from("algorithm            largest k with success_rate >= 0.9\n");
    for curve in curves {
        let best = curve
            .points
            .iter()
            .filter(|pt| pt.success_rate() >= 0.9)
            .map(|pt| pt.sparsity)
            .max();
        let cell = match best {
            Some(k) => k.to_string(),
            None => "-".to_string(),
        };
        out.push_str(&format!("{:<20} {}\n", curve.label, cell));
    }
    out
}
