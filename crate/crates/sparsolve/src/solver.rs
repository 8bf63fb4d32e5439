//! Iterative thresholding solvers.
//!
//! Every family shares the same outer loop: a Landweber step
//! `B_mu(z) = z + mu A^T (b - A z)` with `mu = (1 - eta) / ||A||_2^2`,
//! followed by a componentwise thresholding operator whose weight is set
//! adaptively from the `(r+1)`-th largest magnitudes of the current vectors,
//! where `r` is the assumed sparsity. The families differ in the operator and
//! in the weight rule:
//!
//! - `hard` / `soft`: threshold at `t = (r+1)-th largest |B_mu(z)|`.
//! - `half` / `two_thirds`: closed-form lp proximal operators with an
//!   adaptive scalar `lambda`.
//! - `half_eps` / `two_thirds_eps`: the same operators applied with
//!   per-component weights `lambda mu / (|z_i| + eps_i)^{theta - p}` coming
//!   from a smoothed penalty `|z_i|^theta / (|z_i| + eps_i)^{theta - p}`,
//!   with `eps` refreshed every iteration from the residual gradient.
//!
//! Setting `p = 1/2` in `half_eps` (or `p = 2/3` in `two_thirds_eps`) makes
//! the smoothing weights identically one, so those runs coincide with the
//! plain `half` / `two_thirds` solvers; tests pin that equivalence.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    matvec, matvec_transpose, nonincreasing_rearrangement, norm2, DenseMatrix, LinalgError,
};
use crate::thresholding::{
    half_threshold, hard_threshold, soft_threshold, two_thirds_threshold, ThresholdingError,
};

/// Tolerance and iteration cap for the internal spectral-norm estimate.
const SPECTRAL_TOL: f64 = 1e-10;
const SPECTRAL_MAX_ITER: usize = 1000;

/// Adaptive lambda degenerates to zero when the Landweber image is already
/// r-sparse; it is floored here so the scalar operators stay well defined.
const LAMBDA_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("eta must lie strictly inside (0, 1), got {0}")]
    InvalidEta(f64),
    #[error("p must lie in [0, 1), got {0}")]
    InvalidP(f64),
    #[error("assumed sparsity r = {r} needs r + 1 <= n = {n}")]
    SparsityTooLarge { r: usize, n: usize },
    #[error("assumed sparsity r must be at least 1")]
    ZeroSparsity,
    #[error("step size mu must be positive, got {0}")]
    InvalidStepSize(f64),
    #[error("gamma must be nonnegative, got {0}")]
    InvalidGamma(f64),
    #[error("epsilon floor must be positive, got {0}")]
    InvalidEpsilonFloor(f64),
    #[error("tolerance must be positive, got {0}")]
    InvalidTol(f64),
    #[error("max_iter must be at least 1")]
    InvalidMaxIter,
    #[error(transparent)]
    Thresholding(#[from] ThresholdingError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Which componentwise operator a solver applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdingRule {
    Hard,
    Soft,
    Half,
    TwoThirds,
    HalfEps,
    TwoThirdsEps,
}

impl ThresholdingRule {
    pub const ALL: [ThresholdingRule; 6] = [
        ThresholdingRule::Hard,
        ThresholdingRule::Soft,
        ThresholdingRule::Half,
        ThresholdingRule::TwoThirds,
        ThresholdingRule::HalfEps,
        ThresholdingRule::TwoThirdsEps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ThresholdingRule::Hard => "hard",
            ThresholdingRule::Soft => "soft",
            ThresholdingRule::Half => "half",
            ThresholdingRule::TwoThirds => "two_thirds",
            ThresholdingRule::HalfEps => "half_eps",
            ThresholdingRule::TwoThirdsEps => "two_thirds_eps",
        }
    }

    /// True for the families that carry the smoothing parameter `p` and the
    /// per-iteration `eps` refresh.
    pub fn uses_epsilon(self) -> bool {
        matches!(
            self,
            ThresholdingRule::HalfEps | ThresholdingRule::TwoThirdsEps
        )
    }
}

impl std::fmt::Display for ThresholdingRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Run parameters for a single solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub rule: ThresholdingRule,
    /// Smoothed-penalty exponent; read only by `half_eps` / `two_thirds_eps`.
    pub p: f64,
    /// Step-size margin: `mu = (1 - eta) / ||A||_2^2`.
    pub eta: f64,
    /// Assumed sparsity level `r` feeding the adaptive weight rules.
    pub sparsity_r: usize,
    /// Scale of the residual-gradient eps refresh.
    pub gamma: f64,
    /// Lower bound kept on every eps component.
    pub epsilon_floor: f64,
    /// Relative-change stopping tolerance.
    pub tol: f64,
    pub max_iter: usize,
}

impl SolverConfig {
    pub fn new(rule: ThresholdingRule, sparsity_r: usize) -> Self {
        SolverConfig {
            rule,
            p: 0.1,
            eta: 0.01,
            sparsity_r,
            gamma: 0.7,
            epsilon_floor: 1e-3,
            tol: 1e-8,
            max_iter: 5000,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn validate(&self, n: usize) -> Result<(), SolverError> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(SolverError::InvalidEta(self.eta));
        }
        if self.rule.uses_epsilon() && !(0.0..1.0).contains(&self.p) {
            return Err(SolverError::InvalidP(self.p));
        }
        if self.sparsity_r == 0 {
            return Err(SolverError::ZeroSparsity);
        }
        if self.sparsity_r + 1 > n {
            return Err(SolverError::SparsityTooLarge {
                r: self.sparsity_r,
                n,
            });
        }
        if self.gamma < 0.0 {
            return Err(SolverError::InvalidGamma(self.gamma));
        }
        if self.epsilon_floor <= 0.0 {
            return Err(SolverError::InvalidEpsilonFloor(self.epsilon_floor));
        }
        if self.tol <= 0.0 {
            return Err(SolverError::InvalidTol(self.tol));
        }
        if self.max_iter == 0 {
            return Err(SolverError::InvalidMaxIter);
        }
        Ok(())
    }
}

/// `mu = (1 - eta) / ||A||_2^2`, strictly inside `(0, 1 / ||A||_2^2)`.
///
/// If the spectral-norm power iteration runs out of iterations its last
/// estimate is used; after the internal cap the estimate is far more accurate
/// than the step size needs.
pub fn step_size(a: &DenseMatrix, eta: f64) -> Result<f64, SolverError> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(SolverError::InvalidEta(eta));
    }
    let sigma = match crate::linalg::spectral_norm(a, SPECTRAL_TOL, SPECTRAL_MAX_ITER) {
        Ok(s) => s,
        Err(LinalgError::PowerIterationNoConvergence { estimate, .. }) if estimate > 0.0 => {
            estimate
        }
        Err(e) => return Err(e.into()),
    };
    Ok((1.0 - eta) / (sigma * sigma))
}

fn check_lengths(bz: &[f64], z: &[f64], epsilon: &[f64]) -> Result<(), SolverError> {
    if z.len() != bz.len() {
        return Err(LinalgError::DimensionMismatch {
            expected: bz.len(),
            got: z.len(),
        }
        .into());
    }
    if epsilon.len() != bz.len() {
        return Err(LinalgError::DimensionMismatch {
            expected: bz.len(),
            got: epsilon.len(),
        }
        .into());
    }
    Ok(())
}

/// Adaptive weight for the half family:
/// `8 (|Bz|_(r+1))^{3/2} (|z|_(r+1) + |eps|_(r+1))^{1/2 - p} / (sqrt(54) mu)`,
/// where `|x|_(r+1)` is the `(r+1)`-th largest magnitude of `x` (each vector
/// rearranged by its own magnitudes).
pub fn adaptive_lambda_half(
    bz: &[f64],
    z: &[f64],
    epsilon: &[f64],
    r: usize,
    mu: f64,
    p: f64,
) -> Result<f64, SolverError> {
    check_lengths(bz, z, epsilon)?;
    if r + 1 > bz.len() {
        return Err(SolverError::SparsityTooLarge { r, n: bz.len() });
    }
    if mu <= 0.0 {
        return Err(SolverError::InvalidStepSize(mu));
    }
    let b_r = nonincreasing_rearrangement(bz).values[r];
    let z_r = nonincreasing_rearrangement(z).values[r];
    let e_r = nonincreasing_rearrangement(epsilon).values[r];
    Ok(8.0 * b_r.powf(1.5) * (z_r + e_r).powf(0.5 - p) / (54f64.sqrt() * mu))
}

/// Adaptive weight for the two-thirds family:
/// `4^{4/3} (|Bz|_(r+1))^{4/3} (|z|_(r+1) + |eps|_(r+1))^{2/3 - p} / (48^{4/9} mu)`.
pub fn adaptive_lambda_two_thirds(
    bz: &[f64],
    z: &[f64],
    epsilon: &[f64],
    r: usize,
    mu: f64,
    p: f64,
) -> Result<f64, SolverError> {
    check_lengths(bz, z, epsilon)?;
    if r + 1 > bz.len() {
        return Err(SolverError::SparsityTooLarge { r, n: bz.len() });
    }
    if mu <= 0.0 {
        return Err(SolverError::InvalidStepSize(mu));
    }
    let b_r = nonincreasing_rearrangement(bz).values[r];
    let z_r = nonincreasing_rearrangement(z).values[r];
    let e_r = nonincreasing_rearrangement(epsilon).values[r];
    Ok(256f64.cbrt() * b_r.powf(4.0 / 3.0) * (z_r + e_r).powf(2.0 / 3.0 - p)
        / (48f64.powf(4.0 / 9.0) * mu))
}

/// `mu A^T (b - A z)`, the scaled residual gradient shared by the Landweber
/// step and the eps refresh.
fn scaled_gradient(
    a: &DenseMatrix,
    b: &[f64],
    z: &[f64],
    mu: f64,
) -> Result<Vec<f64>, LinalgError> {
    let az = matvec(a, z)?;
    if b.len() != az.len() {
        return Err(LinalgError::DimensionMismatch {
            expected: az.len(),
            got: b.len(),
        });
    }
    let residual: Vec<f64> = b.iter().zip(&az).map(|(bi, ai)| bi - ai).collect();
    let grad = matvec_transpose(a, &residual)?;
    Ok(grad.into_iter().map(|g| mu * g).collect())
}

/// Per-iteration eps refresh:
/// `eps_i = max(gamma |[mu A^T (b - A z)]_i|, floor)`.
pub fn epsilon_update(
    a: &DenseMatrix,
    b: &[f64],
    z: &[f64],
    mu: f64,
    gamma: f64,
    floor: f64,
) -> Result<Vec<f64>, SolverError> {
    if gamma < 0.0 {
        return Err(SolverError::InvalidGamma(gamma));
    }
    if floor <= 0.0 {
        return Err(SolverError::InvalidEpsilonFloor(floor));
    }
    let grad = scaled_gradient(a, b, z, mu)?;
    Ok(grad
        .into_iter()
        .map(|g| (gamma * g.abs()).max(floor))
        .collect())
}

fn epsilon_from_gradient(grad: &[f64], gamma: f64, floor: f64) -> Vec<f64> {
    grad.iter().map(|g| (gamma * g.abs()).max(floor)).collect()
}

/// Regularized objective `||A z - b||_2^2 + lambda * penalty(z)`, where the
/// penalty matches the rule: `||z||_0` for hard, `||z||_1` for soft, and
/// `sum |z_i|^theta / (|z_i| + eps_i)^{theta - p}` for the lp families
/// (`p` is forced to `theta` for plain `half` / `two_thirds`, which makes the
/// eps term drop out).
pub fn objective(
    a: &DenseMatrix,
    b: &[f64],
    z: &[f64],
    lambda: f64,
    epsilon: &[f64],
    p: f64,
    rule: ThresholdingRule,
) -> f64 {
    let az = matvec(a, z).expect("objective: dimension mismatch");
    assert_eq!(b.len(), az.len(), "objective: dimension mismatch");
    let residual: f64 = b
        .iter()
        .zip(&az)
        .map(|(bi, ai)| (bi - ai) * (bi - ai))
        .sum();
    let penalty = match rule {
        ThresholdingRule::Hard => z.iter().filter(|v| **v != 0.0).count() as f64,
        ThresholdingRule::Soft => z.iter().map(|v| v.abs()).sum(),
        ThresholdingRule::Half | ThresholdingRule::HalfEps => {
            let p_eff = if rule == ThresholdingRule::Half { 0.5 } else { p };
            z.iter()
                .zip(epsilon)
                .map(|(zi, ei)| zi.abs().sqrt() / (zi.abs() + ei).powf(0.5 - p_eff))
                .sum()
        }
        ThresholdingRule::TwoThirds | ThresholdingRule::TwoThirdsEps => {
            let theta = 2.0 / 3.0;
            let p_eff = if rule == ThresholdingRule::TwoThirds {
                theta
            } else {
                p
            };
            z.iter()
                .zip(epsilon)
                .map(|(zi, ei)| zi.abs().powf(theta) / (zi.abs() + ei).powf(theta - p_eff))
                .sum()
        }
    };
    residual + lambda * penalty
}

/// Per-iteration state: the iterate `z^k` together with the step size and the
/// `lambda` / `eps` values used to produce it.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub z: Vec<f64>,
    pub k: usize,
    pub lambda_k: f64,
    pub epsilon: Vec<f64>,
    pub mu: f64,
    pub objective_k: f64,
}

impl SolverState {
    /// Initial state: `eps` uniformly at the floor, `lambda = 0` until the
    /// first iteration computes it.
    pub fn init(
        a: &DenseMatrix,
        b: &[f64],
        config: &SolverConfig,
        z0: Vec<f64>,
    ) -> Result<Self, SolverError> {
        config.validate(a.cols())?;
        if z0.len() != a.cols() {
            return Err(LinalgError::DimensionMismatch {
                expected: a.cols(),
                got: z0.len(),
            }
            .into());
        }
        if b.len() != a.rows() {
            return Err(LinalgError::DimensionMismatch {
                expected: a.rows(),
                got: b.len(),
            }
            .into());
        }
        let mu = step_size(a, config.eta)?;
        let epsilon = vec![config.epsilon_floor; a.cols()];
        let objective_k = objective(a, b, &z0, 0.0, &epsilon, config.p, config.rule);
        Ok(SolverState {
            z: z0,
            k: 0,
            lambda_k: 0.0,
            epsilon,
            mu,
            objective_k,
        })
    }
}

/// One full iteration: Landweber step, adaptive `lambda` (and `eps` for the
/// smoothed families), componentwise thresholding.
pub fn iterate_once(
    state: SolverState,
    a: &DenseMatrix,
    b: &[f64],
    config: &SolverConfig,
) -> Result<SolverState, SolverError> {
    let mu = state.mu;
    let z = &state.z;
    let r = config.sparsity_r;

    let grad = scaled_gradient(a, b, z, mu)?;
    let bz: Vec<f64> = z.iter().zip(&grad).map(|(zi, gi)| zi + gi).collect();

    let (lambda, epsilon, z_next) = match config.rule {
        ThresholdingRule::Hard => {
            let rearr = nonincreasing_rearrangement(&bz);
            // Any threshold in [values[r], values[r-1]) keeps exactly the top
            // r components; the gap midpoint keeps a frozen replay of this
            // step away from the component magnitudes themselves.
            let t = 0.5 * (rearr.values[r - 1] + rearr.values[r]);
            let z_next = bz.iter().map(|&v| hard_threshold(v, t)).collect();
            // Implied l0 weight: hard thresholding at t solves the prox with
            // lambda mu = t^2.
            (t * t / mu, state.epsilon, z_next)
        }
        ThresholdingRule::Soft => {
            let t = nonincreasing_rearrangement(&bz).values[r];
            let z_next = bz.iter().map(|&v| soft_threshold(v, t)).collect();
            // Implied l1 weight: soft thresholding by t solves the prox with
            // lambda mu = 2 t.
            (2.0 * t / mu, state.epsilon, z_next)
        }
        ThresholdingRule::Half => {
            let lambda =
                adaptive_lambda_half(&bz, z, &state.epsilon, r, mu, 0.5)?.max(LAMBDA_FLOOR);
            let z_next = bz
                .iter()
                .map(|&v| half_threshold(v, lambda * mu))
                .collect::<Result<Vec<f64>, _>>()?;
            (lambda, state.epsilon, z_next)
        }
        ThresholdingRule::TwoThirds => {
            let lambda = adaptive_lambda_two_thirds(&bz, z, &state.epsilon, r, mu, 2.0 / 3.0)?
                .max(LAMBDA_FLOOR);
            let z_next = bz
                .iter()
                .map(|&v| two_thirds_threshold(v, lambda * mu))
                .collect::<Result<Vec<f64>, _>>()?;
            (lambda, state.epsilon, z_next)
        }
        ThresholdingRule::HalfEps => {
            let epsilon = epsilon_from_gradient(&grad, config.gamma, config.epsilon_floor);
            let lambda =
                adaptive_lambda_half(&bz, z, &epsilon, r, mu, config.p)?.max(LAMBDA_FLOOR);
            let exponent = 0.5 - config.p;
            let z_next = bz
                .iter()
                .zip(z)
                .zip(&epsilon)
                .map(|((&v, zi), ei)| {
                    half_threshold(v, lambda * mu / (zi.abs() + ei).powf(exponent))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            (lambda, epsilon, z_next)
        }
        ThresholdingRule::TwoThirdsEps => {
            let epsilon = epsilon_from_gradient(&grad, config.gamma, config.epsilon_floor);
            let lambda =
                adaptive_lambda_two_thirds(&bz, z, &epsilon, r, mu, config.p)?.max(LAMBDA_FLOOR);
            let exponent = 2.0 / 3.0 - config.p;
            let z_next = bz
                .iter()
                .zip(z)
                .zip(&epsilon)
                .map(|((&v, zi), ei)| {
                    two_thirds_threshold(v, lambda * mu / (zi.abs() + ei).powf(exponent))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            (lambda, epsilon, z_next)
        }
    };

    let objective_k = objective(a, b, &z_next, lambda, &epsilon, config.p, config.rule);
    Ok(SolverState {
        z: z_next,
        k: state.k + 1,
        lambda_k: lambda,
        epsilon,
        mu,
        objective_k,
    })
}

/// One iteration of the thresholding map with `lambda` and `eps` held fixed
/// (no adaptive update). At a fixed point of the solver this should move `z`
/// by essentially nothing; the test suites use it to check stationarity.
#[allow(clippy::too_many_arguments)]
pub fn iterate_frozen(
    a: &DenseMatrix,
    b: &[f64],
    z: &[f64],
    lambda: f64,
    epsilon: &[f64],
    mu: f64,
    rule: ThresholdingRule,
    p: f64,
) -> Result<Vec<f64>, SolverError> {
    let grad = scaled_gradient(a, b, z, mu)?;
    let bz: Vec<f64> = z.iter().zip(&grad).map(|(zi, gi)| zi + gi).collect();
    let out = match rule {
        ThresholdingRule::Hard => {
            let t = (lambda * mu).sqrt();
            bz.iter().map(|&v| hard_threshold(v, t)).collect()
        }
        ThresholdingRule::Soft => {
            let t = lambda * mu / 2.0;
            bz.iter().map(|&v| soft_threshold(v, t)).collect()
        }
        ThresholdingRule::Half => bz
            .iter()
            .map(|&v| half_threshold(v, lambda * mu))
            .collect::<Result<Vec<f64>, _>>()?,
        ThresholdingRule::TwoThirds => bz
            .iter()
            .map(|&v| two_thirds_threshold(v, lambda * mu))
            .collect::<Result<Vec<f64>, _>>()?,
        ThresholdingRule::HalfEps => {
            let exponent = 0.5 - p;
            bz.iter()
                .zip(z)
                .zip(epsilon)
                .map(|((&v, zi), ei)| {
                    half_threshold(v, lambda * mu / (zi.abs() + ei).powf(exponent))
                })
                .collect::<Result<Vec<f64>, _>>()?
        }
        ThresholdingRule::TwoThirdsEps => {
            let exponent = 2.0 / 3.0 - p;
            bz.iter()
                .zip(z)
                .zip(epsilon)
                .map(|((&v, zi), ei)| {
                    two_thirds_threshold(v, lambda * mu / (zi.abs() + ei).powf(exponent))
                })
                .collect::<Result<Vec<f64>, _>>()?
        }
    };
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    Tolerance,
    MaxIter,
}

/// One trace entry per iteration.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub objective: f64,
    pub step_norm: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub z_star: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TraceRecord>,
    pub termination_reason: TerminationReason,
    /// Final adaptive weight and eps, kept so a frozen iteration can be
    /// replayed from the solution.
    pub final_lambda: f64,
    pub final_epsilon: Vec<f64>,
    pub mu: f64,
}

/// Runs the iteration from `z0` until the relative change
/// `||z^{k+1} - z^k|| / ||z^k||` drops to `tol` (absolute change when
/// `||z^k|| = 0`) or `max_iter` is hit. Non-convergence is a result state,
/// not an error.
pub fn solve(
    a: &DenseMatrix,
    b: &[f64],
    config: &SolverConfig,
    z0: &[f64],
) -> Result<SolverResult, SolverError> {
    let mut state = SolverState::init(a, b, config, z0.to_vec())?;
    let mut trace = Vec::new();
    let mut converged = false;

    for _ in 0..config.max_iter {
        let prev_z = state.z.clone();
        let prev_norm = norm2(&prev_z);
        state = iterate_once(state, a, b, config)?;
        let step_norm = state
            .z
            .iter()
            .zip(&prev_z)
            .map(|(zi, pi)| (zi - pi) * (zi - pi))
            .sum::<f64>()
            .sqrt();
        trace.push(TraceRecord {
            objective: state.objective_k,
            step_norm,
            lambda: state.lambda_k,
        });
        let small_enough = if prev_norm > 0.0 {
            step_norm / prev_norm <= config.tol
        } else {
            step_norm <= config.tol
        };
        if small_enough {
            converged = true;
            break;
        }
    }

    Ok(SolverResult {
        iterations: state.k,
        converged,
        termination_reason: if converged {
            TerminationReason::Tolerance
        } else {
            TerminationReason::MaxIter
        },
        final_lambda: state.lambda_k,
        final_epsilon: state.epsilon,
        mu: state.mu,
        z_star: state.z,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gaussian_matrix, DenseMatrix, RngSeed, SeededRng};

    fn random_sparse(n: usize, k: usize, seed: u64) -> Vec<f64> {
        let mut rng = SeededRng::new(RngSeed(seed));
        let mut z = vec![0.0; n];
        let mut picked = 0;
        while picked < k {
            let idx = rng.index_below(n);
            if z[idx] == 0.0 {
                z[idx] = rng.normal();
                picked += 1;
            }
        }
        z
    }

    #[test]
    fn step_size_identity_examples() {
        let eye = DenseMatrix::identity(4);
        let mu = step_size(&eye, 0.5).unwrap();
        assert!((mu - 0.5).abs() < 1e-9);

        let two_eye = eye.scaled(2.0);
        let mu = step_size(&two_eye, 0.01).unwrap();
        assert!((mu - 0.2475).abs() < 1e-9);
    }

    #[test]
    fn step_size_defining_identity() {
        let a = gaussian_matrix(12, 30, RngSeed(2)).unwrap();
        let sigma = crate::linalg::spectral_norm(&a, 1e-10, 1000).unwrap();
        for eta in [0.01, 0.3, 0.99] {
            let mu = step_size(&a, eta).unwrap();
            assert!((mu * sigma * sigma - (1.0 - eta)).abs() < 1e-8);
        }
        assert!(matches!(
            step_size(&a, 0.0),
            Err(SolverError::InvalidEta(_))
        ));
        assert!(matches!(
            step_size(&a, 1.0),
            Err(SolverError::InvalidEta(_))
        ));
    }

    #[test]
    fn adaptive_lambda_half_hand_example() {
        // n = 4, r = 1: second-largest magnitudes are 3, 1, 0.1.
        let bz = [3.0, 1.0, 4.0, 2.0];
        let z = [1.0, 0.0, 2.0, 0.0];
        let eps = [0.1, 0.1, 0.1, 0.1];
        let got = adaptive_lambda_half(&bz, &z, &eps, 1, 0.5, 0.1).unwrap();
        let expected = 8.0 * 3f64.powf(1.5) * 1.1f64.powf(0.4) / (54f64.sqrt() * 0.5);
        assert!((got - expected).abs() < 1e-12, "got {got}, want {expected}");
    }

    #[test]
    fn adaptive_lambda_two_thirds_hand_example() {
        let bz = [3.0, 1.0, 4.0, 2.0];
        let z = [1.0, 0.0, 2.0, 0.0];
        let eps = [0.1, 0.1, 0.1, 0.1];
        let got = adaptive_lambda_two_thirds(&bz, &z, &eps, 1, 0.5, 0.0).unwrap();
        let expected = 256f64.cbrt() * 3f64.powf(4.0 / 3.0) * 1.1f64.powf(2.0 / 3.0)
            / (48f64.powf(4.0 / 9.0) * 0.5);
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn adaptive_lambda_degenerate_and_reduction_cases() {
        // (r+1)-th largest of bz is 0 -> lambda 0.
        let bz = [5.0, 0.0, 0.0];
        let z = [1.0, 0.0, 0.0];
        let eps = [1e-3, 1e-3, 1e-3];
        assert_eq!(
            adaptive_lambda_half(&bz, &z, &eps, 1, 0.5, 0.1).unwrap(),
            0.0
        );
        assert_eq!(
            adaptive_lambda_two_thirds(&bz, &z, &eps, 1, 0.5, 0.1).unwrap(),
            0.0
        );

        // p = 1/2 kills the second factor entirely.
        let bz = [1.0, 1.0, 1.0];
        let z = [0.0; 3];
        let mu = 0.25;
        let got = adaptive_lambda_half(&bz, &z, &eps, 1, mu, 0.5).unwrap();
        assert!((got - 8.0 / (54f64.sqrt() * mu)).abs() < 1e-12);

        // p = 2/3 likewise for the two-thirds family.
        let got = adaptive_lambda_two_thirds(&bz, &z, &eps, 1, mu, 2.0 / 3.0).unwrap();
        assert!((got - 256f64.cbrt() / (48f64.powf(4.0 / 9.0) * mu)).abs() < 1e-12);
    }

    #[test]
    fn adaptive_lambda_rejects_oversized_r() {
        let v = [1.0, 2.0];
        assert!(matches!(
            adaptive_lambda_half(&v, &v, &v, 2, 0.5, 0.1),
            Err(SolverError::SparsityTooLarge { .. })
        ));
    }

    #[test]
    fn epsilon_update_examples() {
        let eye = DenseMatrix::identity(2);
        // |mu A^T (b - A z)| = (1, 0) -> eps = (0.7, floor).
        let eps = epsilon_update(&eye, &[2.0, 0.0], &[0.0, 0.0], 0.5, 0.7, 1e-3).unwrap();
        assert_eq!(eps, vec![0.7, 1e-3]);

        // Zero residual -> floor everywhere.
        let eps = epsilon_update(&eye, &[1.0, 1.0], &[1.0, 1.0], 0.5, 0.7, 1e-3).unwrap();
        assert_eq!(eps, vec![1e-3, 1e-3]);

        // gamma = 0 -> floor everywhere.
        let eps = epsilon_update(&eye, &[2.0, 0.0], &[0.0, 0.0], 0.5, 0.0, 1e-3).unwrap();
        assert_eq!(eps, vec![1e-3, 1e-3]);
    }

    #[test]
    fn objective_examples() {
        let a = gaussian_matrix(5, 8, RngSeed(31)).unwrap();
        let mut rng = SeededRng::new(RngSeed(32));
        let b: Vec<f64> = (0..5).map(|_| rng.normal()).collect();
        let eps = vec![1e-3; 8];

        // z = 0: penalty vanishes for every family.
        let b_sq = dot_self(&b);
        for rule in ThresholdingRule::ALL {
            let got = objective(&a, &b, &[0.0; 8], 3.0, &eps, 0.1, rule);
            assert!((got - b_sq).abs() < 1e-12, "{rule}: {got} vs {b_sq}");
        }

        // lambda = 0: residual only.
        let z: Vec<f64> = (0..8).map(|_| rng.normal()).collect();
        let az = matvec(&a, &z).unwrap();
        let resid: f64 = b.iter().zip(&az).map(|(bi, ai)| (bi - ai) * (bi - ai)).sum();
        let got = objective(&a, &b, &z, 0.0, &eps, 0.1, ThresholdingRule::HalfEps);
        assert!((got - resid).abs() < 1e-12);

        // half_eps at p = 1/2 equals residual + lambda ||z||_{1/2}^{1/2}.
        let lambda = 2.5;
        let got = objective(&a, &b, &z, lambda, &eps, 0.5, ThresholdingRule::HalfEps);
        let expected = resid + lambda * z.iter().map(|v| v.abs().sqrt()).sum::<f64>();
        assert!((got - expected).abs() < 1e-12);
    }

    fn dot_self(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum()
    }

    #[test]
    fn trivial_problem_converges_immediately() {
        let a = gaussian_matrix(6, 12, RngSeed(41)).unwrap();
        let b = vec![0.0; 6];
        for rule in ThresholdingRule::ALL {
            let config = SolverConfig::new(rule, 2);
            let result = solve(&a, &b, &config, &[0.0; 12]).unwrap();
            assert!(result.converged, "{rule}");
            assert_eq!(result.iterations, 1);
            assert_eq!(result.trace.len(), 1);
            assert!(result.z_star.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn max_iter_contract() {
        let a = gaussian_matrix(8, 24, RngSeed(43)).unwrap();
        let z_true = random_sparse(24, 3, 44);
        let b = matvec(&a, &z_true).unwrap();
        let mut config = SolverConfig::new(ThresholdingRule::HalfEps, 3);
        config.max_iter = 1;
        let result = solve(&a, &b, &config, &[0.0; 24]).unwrap();
        assert_eq!(result.iterations, 1);
        assert!(!result.converged);
        assert_eq!(result.termination_reason, TerminationReason::MaxIter);
    }

    #[test]
    fn first_iteration_descends() {
        // Frozen-(lambda, eps) descent on one step of every family.
        let a = gaussian_matrix(32, 128, RngSeed(50)).unwrap();
        let z_true = random_sparse(128, 3, 51);
        let b = matvec(&a, &z_true).unwrap();
        for rule in ThresholdingRule::ALL {
            let config = SolverConfig::new(rule, 3);
            let state = SolverState::init(&a, &b, &config, vec![0.0; 128]).unwrap();
            let z0 = state.z.clone();
            let next = iterate_once(state, &a, &b, &config).unwrap();
            let before = objective(
                &a,
                &b,
                &z0,
                next.lambda_k,
                &next.epsilon,
                config.p,
                rule,
            );
            assert!(
                next.objective_k <= before + 1e-10,
                "{rule}: {} > {}",
                next.objective_k,
                before
            );
        }
    }

    #[test]
    fn exact_recovery_in_the_easy_regime() {
        let a = gaussian_matrix(64, 256, RngSeed(60)).unwrap();
        let z_true = random_sparse(256, 5, 61);
        let b = matvec(&a, &z_true).unwrap();
        let config = SolverConfig::new(ThresholdingRule::HalfEps, 5).with_p(0.1);
        let result = solve(&a, &b, &config, &vec![0.0; 256]).unwrap();
        assert!(result.converged);
        let diff: Vec<f64> = result
            .z_star
            .iter()
            .zip(&z_true)
            .map(|(a, b)| a - b)
            .collect();
        let re = norm2(&diff) / norm2(&z_true);
        assert!(re <= 1e-4, "relative error {re}");
    }

    #[test]
    fn half_eps_at_half_matches_half_exactly() {
        let a = gaussian_matrix(32, 128, RngSeed(70)).unwrap();
        let z_true = random_sparse(128, 3, 71);
        let b = matvec(&a, &z_true).unwrap();

        let classic = SolverConfig::new(ThresholdingRule::Half, 3);
        let smoothed = SolverConfig::new(ThresholdingRule::HalfEps, 3).with_p(0.5);
        let mut s1 = SolverState::init(&a, &b, &classic, vec![0.0; 128]).unwrap();
        let mut s2 = SolverState::init(&a, &b, &smoothed, vec![0.0; 128]).unwrap();
        for _ in 0..50 {
            s1 = iterate_once(s1, &a, &b, &classic).unwrap();
            s2 = iterate_once(s2, &a, &b, &smoothed).unwrap();
            for (x, y) in s1.z.iter().zip(&s2.z) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn asymptotic_regularity_of_the_tail() {
        let a = gaussian_matrix(64, 256, RngSeed(80)).unwrap();
        let z_true = random_sparse(256, 5, 81);
        let b = matvec(&a, &z_true).unwrap();
        let config = SolverConfig::new(ThresholdingRule::HalfEps, 5).with_p(0.1);
        let result = solve(&a, &b, &config, &vec![0.0; 256]).unwrap();
        assert!(result.converged && result.trace.len() >= 10);
        let tail = &result.trace[result.trace.len() - 10..];
        for pair in tail.windows(2) {
            assert!(
                pair[1].step_norm <= pair[0].step_norm + 1e-6,
                "step norms not settling: {} then {}",
                pair[0].step_norm,
                pair[1].step_norm
            );
        }
    }

    #[test]
    fn support_never_explodes() {
        let a = gaussian_matrix(32, 128, RngSeed(90)).unwrap();
        let z_true = random_sparse(128, 4, 91);
        let b = matvec(&a, &z_true).unwrap();
        for rule in [ThresholdingRule::HalfEps, ThresholdingRule::TwoThirdsEps] {
            let config = SolverConfig::new(rule, 4).with_p(0.1);
            let mut state = SolverState::init(&a, &b, &config, vec![0.0; 128]).unwrap();
            for _ in 0..30 {
                state = iterate_once(state, &a, &b, &config).unwrap();
                let nnz = state.z.iter().filter(|v| **v != 0.0).count();
                assert!(nnz <= 128);
                assert!(state.epsilon.iter().all(|&e| e >= config.epsilon_floor));
            }
        }
    }

    #[test]
    fn config_validation_rejects_bad_parameters() {
        let mut c = SolverConfig::new(ThresholdingRule::HalfEps, 300);
        assert!(matches!(
            c.validate(256),
            Err(SolverError::SparsityTooLarge { .. })
        ));
        c.sparsity_r = 5;
        c.p = 1.0;
        assert!(matches!(c.validate(256), Err(SolverError::InvalidP(_))));
        c.p = 0.1;
        c.eta = 1.5;
        assert!(matches!(c.validate(256), Err(SolverError::InvalidEta(_))));
        c.eta = 0.01;
        c.epsilon_floor = 0.0;
        assert!(matches!(
            c.validate(256),
            Err(SolverError::InvalidEpsilonFloor(_))
        ));
        c.epsilon_floor = 1e-3;
        c.max_iter = 0;
        assert!(matches!(c.validate(256), Err(SolverError::InvalidMaxIter)));
        c.max_iter = 10;
        assert!(c.validate(256).is_ok());
    }
}
