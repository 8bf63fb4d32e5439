//! Closed-form scalar thresholding operators.
//!
//! `half_threshold` and `two_thirds_threshold` are the proximal maps of the
//! `|beta|^{1/2}` and `|beta|^{2/3}` penalties: each minimizes
//! `(beta - r)^2 + lambda |beta|^q` in closed form, returning zero below a
//! lambda-dependent jump and an explicit trigonometric / hyperbolic branch
//! above it. `hard_threshold` and `soft_threshold` are the standard l0/l1
//! maps used by the baseline solvers.
//!
//! All operators are exactly odd in `r`: the interior branches are evaluated
//! on `|r|` and the sign is applied last.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ThresholdingError {
    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(f64),
}

fn check_lambda(lambda: f64) -> Result<(), ThresholdingError> {
    if lambda > 0.0 {
        Ok(())
    } else {
        Err(ThresholdingError::NonPositiveLambda(lambda))
    }
}

/// Jump location of the half-penalty proximal map:
/// `(54^{1/3} / 4) lambda^{2/3}`.
pub fn t_half(lambda: f64) -> Result<f64, ThresholdingError> {
    check_lambda(lambda)?;
    Ok(54f64.cbrt() / 4.0 * lambda.powf(2.0 / 3.0))
}

/// Jump location of the two-thirds-penalty proximal map:
/// `(48^{1/4} / 3) lambda^{3/4}`.
pub fn t_two_thirds(lambda: f64) -> Result<f64, ThresholdingError> {
    check_lambda(lambda)?;
    Ok(48f64.powf(0.25) / 3.0 * lambda.powf(0.75))
}

/// Interior branch of the half operator:
/// `(2/3) |r| (1 + cos(2 pi / 3 - (2/3) arccos((lambda/8) (|r|/3)^{-3/2})))`.
///
/// The arccos argument is clamped to `[-1, 1]`; it can drift just past 1 in
/// floating point when `|r|` sits on the jump.
fn f_half(r_abs: f64, lambda: f64) -> f64 {
    let arg = (lambda / 8.0 * (r_abs / 3.0).powf(-1.5)).clamp(-1.0, 1.0);
    let angle = 2.0 * std::f64::consts::FRAC_PI_3 - 2.0 / 3.0 * arg.acos();
    2.0 / 3.0 * r_abs * (1.0 + angle.cos())
}

/// Minimizer of `(beta - r)^2 + lambda |beta|^{1/2}`: zero for
/// `|r| <= t_half(lambda)`, the interior branch above.
pub fn half_threshold(r: f64, lambda: f64) -> Result<f64, ThresholdingError> {
    let t = t_half(lambda)?;
    let r_abs = r.abs();
    if r_abs <= t {
        Ok(0.0)
    } else {
        Ok(f_half(r_abs, lambda) * r.signum())
    }
}

/// Interior branch of the two-thirds operator:
/// `(1/8) (phi + sqrt(2|r|/phi - phi^2))^3` with
/// `phi = (2/sqrt(3)) lambda^{1/4} sqrt(cosh((1/3) arccosh((27/16) lambda^{-3/2} r^2)))`.
///
/// The arccosh argument is clamped to `>= 1` and the radicand to `>= 0`; both
/// can dip infinitesimally out of range at the jump.
fn f_two_thirds(r_abs: f64, lambda: f64) -> f64 {
    let acosh_arg = (27.0 / 16.0 * lambda.powf(-1.5) * r_abs * r_abs).max(1.0);
    let phi = 2.0 / 3f64.sqrt() * lambda.powf(0.25) * (acosh_arg.acosh() / 3.0).cosh().sqrt();
    let radicand = (2.0 * r_abs / phi - phi * phi).max(0.0);
    let s = phi + radicand.sqrt();
    s * s * s / 8.0
}

/// Minimizer of `(beta - r)^2 + lambda |beta|^{2/3}`: zero for
/// `|r| <= t_two_thirds(lambda)`, the interior branch above.
pub fn two_thirds_threshold(r: f64, lambda: f64) -> Result<f64, ThresholdingError> {
    let t = t_two_thirds(lambda)?;
    let r_abs = r.abs();
    if r_abs <= t {
        Ok(0.0)
    } else {
        Ok(f_two_thirds(r_abs, lambda) * r.signum())
    }
}

/// Keeps `r` when `|r| > t`, zero otherwise (the boundary maps to zero).
pub fn hard_threshold(r: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    if r.abs() > t {
        r
    } else {
        0.0
    }
}

/// `sign(r) max(|r| - t, 0)`.
pub fn soft_threshold(r: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let shrunk = r.abs() - t;
    if shrunk > 0.0 {
        shrunk * r.signum()
    } else {
        0.0
    }
}
