//! Benchmark harness: problem generation, trial execution, and success-rate
//! sweeps over sparsity.
//!
//! Determinism contract: every (sparsity, trial) cell derives its own seed
//! from the base seed, independent of the algorithm under test, so all
//! algorithms in one sweep see identical problem instances. Cells are pure
//! and may run in parallel; aggregation happens in a fixed order, so results
//! are identical to a serial run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::linalg::{
    derive_seed, gaussian_matrix, matvec, norm2, DenseMatrix, LinalgError, RngSeed, SeededRng,
};
use crate::solver::{solve, SolverConfig, SolverError, ThresholdingRule};

// Role tags for sub-seed derivation; distinct constants keep the matrix,
// signal, noise, and per-trial streams independent.
const ROLE_MATRIX: u64 = 0x01;
const ROLE_SIGNAL: u64 = 0x02;
const ROLE_NOISE: u64 = 0x03;
const ROLE_TRIAL: u64 = 0x10;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("sparsity k = {k} exceeds signal length n = {n}")]
    SparsityExceedsLength { k: usize, n: usize },
    #[error("instance requires k < m < n, got k = {k}, m = {m}, n = {n}")]
    BadInstanceShape { k: usize, m: usize, n: usize },
    #[error("relative error is undefined for a zero truth vector")]
    ZeroTruthVector,
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One generated recovery problem: measurements `b = A z_true + e`.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub z_true: Vec<f64>,
    pub sparsity_k: usize,
    pub noise_sigma: f64,
    pub seed: RngSeed,
}

impl ProblemInstance {
    /// SHA-256 over the dimensions and raw bit patterns of `A`, `b`, and
    /// `z_true`. Two instances are interchangeable iff their digests match.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.a.rows() as u64).to_le_bytes());
        hasher.update((self.a.cols() as u64).to_le_bytes());
        for &e in self.a.entries() {
            hasher.update(e.to_bits().to_le_bytes());
        }
        for &e in &self.b {
            hasher.update(e.to_bits().to_le_bytes());
        }
        for &e in &self.z_true {
            hasher.update(e.to_bits().to_le_bytes());
        }
        let out = hasher.finalize();
        out.iter().map(|byte| format!("{byte:02x}")).collect()
    }
}

/// Signal with exactly `k` nonzeros: support drawn uniformly without
/// replacement (partial Fisher-Yates), values i.i.d. standard normal.
pub fn generate_sparse_signal(
    n: usize,
    k: usize,
    seed: RngSeed,
) -> Result<Vec<f64>, ExperimentError> {
    if k > n {
        return Err(ExperimentError::SparsityExceedsLength { k, n });
    }
    let mut rng = SeededRng::new(seed);
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.index_below(n - i);
        indices.swap(i, j);
    }
    let mut z = vec![0.0; n];
    for &idx in &indices[..k] {
        z[idx] = rng.normal();
    }
    Ok(z)
}

/// Builds a full instance from one seed: sub-seeds for the matrix, the
/// signal, and the noise are derived deterministically, and
/// `b = A z_true + e` with `e_i ~ N(0, sigma^2)` (`sigma` is the standard
/// deviation; omitted entirely when zero).
pub fn make_instance(
    m: usize,
    n: usize,
    k: usize,
    noise_sigma: f64,
    seed: RngSeed,
) -> Result<ProblemInstance, ExperimentError> {
    if !(k < m && m < n) {
        return Err(ExperimentError::BadInstanceShape { k, m, n });
    }
    let a = gaussian_matrix(m, n, derive_seed(seed, &[ROLE_MATRIX]))?;
    let z_true = generate_sparse_signal(n, k, derive_seed(seed, &[ROLE_SIGNAL]))?;
    let mut b = matvec(&a, &z_true)?;
    if noise_sigma > 0.0 {
        let mut rng = SeededRng::new(derive_seed(seed, &[ROLE_NOISE]));
        for bi in &mut b {
            *bi += noise_sigma * rng.normal();
        }
    }
    Ok(ProblemInstance {
        a,
        b,
        z_true,
        sparsity_k: k,
        noise_sigma,
        seed,
    })
}

/// `||z_star - z_true||_2 / ||z_true||_2`.
pub fn relative_error(z_star: &[f64], z_true: &[f64]) -> Result<f64, ExperimentError> {
    let denom = norm2(z_true);
    if denom == 0.0 {
        return Err(ExperimentError::ZeroTruthVector);
    }
    let diff: Vec<f64> = z_star.iter().zip(z_true).map(|(a, b)| a - b).collect();
    Ok(norm2(&diff) / denom)
}

/// One algorithm under test: a rule plus its smoothing exponent (ignored by
/// the families that do not read `p`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmEntry {
    pub rule: ThresholdingRule,
    #[serde(default)]
    pub p: f64,
}

impl AlgorithmEntry {
    pub fn label(&self) -> String {
        if self.rule.uses_epsilon() {
            format!("{}_p{}", self.rule, self.p)
        } else {
            self.rule.to_string()
        }
    }
}

/// Inclusive sparsity range with step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityRange {
    pub min: usize,
    pub max: usize,
    pub step: usize,
}

impl SparsityRange {
    pub fn values(&self) -> Vec<usize> {
        (self.min..=self.max).step_by(self.step.max(1)).collect()
    }
}

fn default_trials() -> usize {
    20
}

fn default_success_threshold() -> f64 {
    1e-4
}

/// Solver parameters shared by every cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverTuning {
    pub eta: f64,
    pub gamma: f64,
    pub epsilon_floor: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverTuning {
    fn default() -> Self {
        SolverTuning {
            eta: 0.01,
            gamma: 0.7,
            epsilon_floor: 1e-3,
            tol: 1e-8,
            max_iter: 5000,
        }
    }
}

impl SolverTuning {
    pub fn to_config(self, entry: AlgorithmEntry, sparsity_r: usize) -> SolverConfig {
        SolverConfig {
            rule: entry.rule,
            p: entry.p,
            eta: self.eta,
            sparsity_r,
            gamma: self.gamma,
            epsilon_floor: self.epsilon_floor,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

/// Full sweep definition; serializable so a run manifest can echo it back
/// for exact reproduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub m: usize,
    pub n: usize,
    pub sparsity: SparsityRange,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub algorithms: Vec<AlgorithmEntry>,
    #[serde(default)]
    pub noise_sigma: f64,
    pub base_seed: RngSeed,
    #[serde(default = "default_success_threshold")]
    pub success_threshold: f64,
    #[serde(default)]
    pub solver: SolverTuning,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.m >= self.n {
            return Err(ExperimentError::InvalidSpec(format!(
                "need m < n, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if self.sparsity.min == 0 {
            return Err(ExperimentError::InvalidSpec(
                "sparsity range must start at k >= 1".into(),
            ));
        }
        if self.sparsity.max >= self.m {
            return Err(ExperimentError::InvalidSpec(format!(
                "sparsity maximum {} must stay below m = {}",
                self.sparsity.max, self.m
            )));
        }
        if self.sparsity.min > self.sparsity.max || self.sparsity.step == 0 {
            return Err(ExperimentError::InvalidSpec(format!(
                "bad sparsity range {:?}",
                self.sparsity
            )));
        }
        if self.trials == 0 {
            return Err(ExperimentError::InvalidSpec("trials must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(ExperimentError::InvalidSpec(
                "algorithm list is empty".into(),
            ));
        }
        if self.success_threshold.is_nan() || self.success_threshold <= 0.0 {
            return Err(ExperimentError::InvalidSpec(
                "success threshold must be positive".into(),
            ));
        }
        if self.noise_sigma < 0.0 {
            return Err(ExperimentError::InvalidSpec(
                "noise sigma must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Seed for trial `t` at sparsity `k`; shared by every algorithm so
    /// trials are paired.
    pub fn trial_seed(&self, k: usize, t: usize) -> RngSeed {
        derive_seed(self.base_seed, &[ROLE_TRIAL, k as u64, t as u64])
    }
}

/// Aggregated results for one (algorithm, sparsity) cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvePoint {
    pub sparsity: usize,
    pub successes: usize,
    pub trials: usize,
    pub mean_re: f64,
    pub mean_iterations: f64,
    pub min_iterations: usize,
    pub max_iterations: usize,
}

impl CurvePoint {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Success-rate curve over sparsity for one algorithm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuccessCurve {
    pub label: String,
    pub rule: ThresholdingRule,
    pub p: f64,
    pub points: Vec<CurvePoint>,
}

struct TrialOutcome {
    re: f64,
    iterations: usize,
    success: bool,
}

fn run_trial(
    spec: &ExperimentSpec,
    entry: AlgorithmEntry,
    k: usize,
    t: usize,
) -> Result<TrialOutcome, ExperimentError> {
    let instance = make_instance(spec.m, spec.n, k, spec.noise_sigma, spec.trial_seed(k, t))?;
    let config = spec.solver.to_config(entry, k);
    let result = solve(&instance.a, &instance.b, &config, &vec![0.0; spec.n])?;
    let re = relative_error(&result.z_star, &instance.z_true)?;
    // A run that hits the iteration cap counts as a failure no matter how
    // close it landed.
    let success = result.converged && re <= spec.success_threshold;
    Ok(TrialOutcome {
        re,
        iterations: result.iterations,
        success,
    })
}

/// Runs every (algorithm, sparsity, trial) cell and aggregates success
/// curves. Cells execute on the ambient rayon pool; results are reduced in a
/// fixed order so the output does not depend on scheduling.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<SuccessCurve>, ExperimentError> {
    spec.validate()?;
    let sparsities = spec.sparsity.values();

    let mut cells = Vec::new();
    for (alg_idx, _) in spec.algorithms.iter().enumerate() {
        for &k in &sparsities {
            for t in 0..spec.trials {
                cells.push((alg_idx, k, t));
            }
        }
    }

    let outcomes: Result<Vec<TrialOutcome>, ExperimentError> = cells
        .par_iter()
        .map(|&(alg_idx, k, t)| run_trial(spec, spec.algorithms[alg_idx], k, t))
        .collect();
    let outcomes = outcomes?;

    let mut curves = Vec::with_capacity(spec.algorithms.len());
    let mut cursor = 0;
    for entry in &spec.algorithms {
        let mut points = Vec::with_capacity(sparsities.len());
        for &k in &sparsities {
            let slice = &outcomes[cursor..cursor + spec.trials];
            cursor += spec.trials;
            let successes = slice.iter().filter(|o| o.success).count();
            let mean_re = slice.iter().map(|o| o.re).sum::<f64>() / spec.trials as f64;
            let mean_iterations =
                slice.iter().map(|o| o.iterations as f64).sum::<f64>() / spec.trials as f64;
            let min_iterations = slice.iter().map(|o| o.iterations).min().unwrap_or(0);
            let max_iterations = slice.iter().map(|o| o.iterations).max().unwrap_or(0);
            points.push(CurvePoint {
                sparsity: k,
                successes,
                trials: spec.trials,
                mean_re,
                mean_iterations,
                min_iterations,
                max_iterations,
            });
        }
        curves.push(SuccessCurve {
            label: entry.label(),
            rule: entry.rule,
            p: entry.p,
            points,
        });
    }
    Ok(curves)
}
