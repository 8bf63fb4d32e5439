//! Brute-force reference minimizer for the scalar penalized problems.
//!
//! This module exists for the test suites: it locates the global minimizer of
//! `(beta - r)^2 + lambda |beta|^q` by exhaustive grid search plus
//! golden-section refinement, and never touches the closed-form operators it
//! is used to verify.

/// One scalar subproblem `min_beta (beta - anchor)^2 + lambda_eff |beta|^q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarProxProblem {
    /// The anchor `r` (a component of a Landweber image in solver use).
    pub anchor: f64,
    /// Effective regularization weight; must be positive.
    pub lambda_eff: f64,
    /// Penalty power `q`.
    pub exponent: f64,
}

impl ScalarProxProblem {
    pub fn new(anchor: f64, lambda_eff: f64, exponent: f64) -> Self {
        assert!(lambda_eff > 0.0, "lambda_eff must be positive");
        ScalarProxProblem {
            anchor,
            lambda_eff,
            exponent,
        }
    }

    pub fn objective(&self, beta: f64) -> f64 {
        (beta - self.anchor) * (beta - self.anchor)
            + self.lambda_eff * beta.abs().powf(self.exponent)
    }

    /// Global minimizer by brute force.
    ///
    /// Any minimizer satisfies `|beta| <= 2 |anchor|` (beyond that the
    /// quadratic term alone exceeds the objective at zero), so a coarse grid
    /// over `[-2|anchor| - 1, 2|anchor| + 1]` at step 1e-3 brackets it; the
    /// best bracket is refined by golden section to 1e-8 and compared against
    /// `beta = 0`, with ties resolving to zero.
    pub fn solve(&self) -> f64 {
        let half_width = 2.0 * self.anchor.abs() + 1.0;
        let step = 1e-3;
        let count = (2.0 * half_width / step).ceil() as usize + 1;
        let mut best_beta = -half_width;
        let mut best_value = self.objective(best_beta);
        for i in 1..count {
            let beta = -half_width + i as f64 * step;
            let value = self.objective(beta);
            if value < best_value {
                best_value = value;
                best_beta = beta;
            }
        }

        let refined = golden_section_minimize(
            |beta| self.objective(beta),
            best_beta - step,
            best_beta + step,
            1e-8,
        );
        if self.objective(0.0) <= self.objective(refined) {
            0.0
        } else {
            refined
        }
    }
}

/// Golden-section search for the minimum of `f` on `[a, b]`; returns the
/// argument once the bracket is narrower than `tol_x`.
pub fn golden_section_minimize(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol_x: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol_x {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Global minimizer of `(beta - r)^2 + lambda |beta|^q` for `q` in `(0, 1]`.
pub fn scalar_prox_oracle(r: f64, lambda: f64, q: f64) -> f64 {
    ScalarProxProblem::new(r, lambda, q).solve()
}

/// Location of the oracle's jump from the zero branch to the interior branch,
/// found by bisecting `r` on `[0, hi]` until the bracket is narrower than
/// `tol_r`. Assumes `hi` maps to a nonzero minimizer.
pub fn oracle_jump_location(lambda: f64, q: f64, hi: f64, tol_r: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = hi;
    debug_assert!(scalar_prox_oracle(hi, lambda, q) != 0.0);
    while hi - lo > tol_r {
        let mid = 0.5 * (lo + hi);
        if scalar_prox_oracle(mid, lambda, q) == 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
