//! TOML configuration for the CLI: sweep/compare specs and single-solve
//! setups, plus the `--quick` down-scaling used for CI-sized runs.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::experiment::{AlgorithmEntry, ExperimentSpec, SolverTuning, SparsityRange};
use crate::linalg::RngSeed;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn read_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    toml::from_str(&text).map_err(|e| ConfigError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemSection {
    m: usize,
    n: usize,
    #[serde(default)]
    noise_sigma: f64,
}

fn default_trials() -> usize {
    20
}

fn default_success_threshold() -> f64 {
    1e-4
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    sparsity_min: usize,
    sparsity_max: usize,
    #[serde(default = "one")]
    sparsity_step: usize,
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default)]
    base_seed: u64,
    #[serde(default = "default_success_threshold")]
    success_threshold: f64,
}

fn one() -> usize {
    1
}

/// On-disk sweep configuration; see the README for the format.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    problem: ProblemSection,
    sweep: SweepSection,
    #[serde(default)]
    solver: SolverTuning,
    algorithms: Vec<AlgorithmEntry>,
}

/// Loads a sweep/compare spec from TOML and validates it.
pub fn load_sweep_config(path: &Path) -> Result<ExperimentSpec, ConfigError> {
    let file: SweepFile = read_toml(path)?;
    let spec = ExperimentSpec {
        m: file.problem.m,
        n: file.problem.n,
        sparsity: SparsityRange {
            min: file.sweep.sparsity_min,
            max: file.sweep.sparsity_max,
            step: file.sweep.sparsity_step,
        },
        trials: file.sweep.trials,
        algorithms: file.algorithms,
        noise_sigma: file.problem.noise_sigma,
        base_seed: RngSeed(file.sweep.base_seed),
        success_threshold: file.sweep.success_threshold,
        solver: file.solver,
    };
    spec.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(spec)
}

/// `--quick` scaling: the problem shrinks to `m = 64, n = 256` with 5 trials,
/// and the sparsity range scales by `64 / m` so the sweep probes the same
/// fraction of the measurement count.
pub const QUICK_M: usize = 64;
pub const QUICK_N: usize = 256;
pub const QUICK_TRIALS: usize = 5;

pub fn apply_quick(spec: &mut ExperimentSpec) {
    let ratio = QUICK_M as f64 / spec.m as f64;
    let scale = |k: usize| ((k as f64 * ratio).round() as usize).max(1);
    spec.sparsity = SparsityRange {
        min: scale(spec.sparsity.min),
        max: scale(spec.sparsity.max).min(QUICK_M - 1),
        step: scale(spec.sparsity.step),
    };
    if spec.sparsity.min > spec.sparsity.max {
        spec.sparsity.min = spec.sparsity.max;
    }
    spec.m = QUICK_M;
    spec.n = QUICK_N;
    spec.trials = QUICK_TRIALS;
}

/// Instance source for `solve`: either generated from a seed or loaded from
/// CSV files.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSection {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub sparsity: Option<usize>,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
    pub matrix: Option<PathBuf>,
    pub rhs: Option<PathBuf>,
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSection {
    pub rule: crate::solver::ThresholdingRule,
    #[serde(default)]
    pub p: f64,
    pub sparsity_r: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveFile {
    pub instance: InstanceSection,
    #[serde(default)]
    pub solver: SolverTuning,
    pub algorithm: AlgorithmSection,
}

pub fn load_solve_config(path: &Path) -> Result<SolveFile, ConfigError> {
    let file: SolveFile = read_toml(path)?;
    let generated = file.instance.m.is_some() || file.instance.n.is_some();
    let from_files = file.instance.matrix.is_some();
    if generated == from_files {
        return Err(ConfigError::Invalid(
            "instance must set either (m, n, sparsity) or (matrix, rhs) file paths".into(),
        ));
    }
    if generated && (file.instance.m.is_none() || file.instance.n.is_none() || file.instance.sparsity.is_none()) {
        return Err(ConfigError::Invalid(
            "generated instance needs m, n, and sparsity".into(),
        ));
    }
    if from_files && file.instance.rhs.is_none() {
        return Err(ConfigError::Invalid(
            "file-based instance needs both matrix and rhs".into(),
        ));
    }
    Ok(file)
}
