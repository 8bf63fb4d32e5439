//! Dense row-major linear algebra, seeded Gaussian sampling, a power-iteration
//! spectral norm, and the nonincreasing rearrangement used by the adaptive
//! regularization rules.
//!
//! Everything here is deterministic: random generation happens only through an
//! explicit [`RngSeed`], and the generator is pinned (ChaCha8 with a Box-Muller
//! normal transform) so that a seed produces the same stream on every run.

use std::cmp::Ordering;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("entry count mismatch: {rows}x{cols} matrix needs {expected} entries, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("dimension mismatch: expected vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("spectral norm requires a nonzero matrix")]
    ZeroMatrix,
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("power iteration did not reach tolerance in {iterations} iterations (last estimate {estimate})")]
    PowerIterationNoConvergence { estimate: f64, iterations: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: cannot parse '{token}' as a number")]
    CsvParse {
        path: String,
        line: usize,
        token: String,
    },
}

/// Seed for the pinned random generator. Identical seeds yield identical
/// streams across runs and platforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        RngSeed(v)
    }
}

/// SplitMix64 finalizer; the basis of all sub-seed derivation.
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a sub-seed by folding `words` into `base` one SplitMix64 step at a
/// time: `s <- splitmix64(s ^ splitmix64(w))`. Used to give every (role, k,
/// trial) cell its own independent stream.
pub fn derive_seed(base: RngSeed, words: &[u64]) -> RngSeed {
    let mut s = base.0;
    for &w in words {
        s = splitmix64(s ^ splitmix64(w));
    }
    RngSeed(s)
}

/// Deterministic random source: ChaCha8 keyed by the seed, with normals via
/// the Box-Muller transform on 53-bit uniforms.
pub struct SeededRng {
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: RngSeed) -> Self {
        SeededRng {
            rng: ChaCha8Rng::seed_from_u64(seed.0),
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` from the top 53 bits of one `u64`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller: `u1` in `(0, 1]`, `u2` in `[0, 1)`,
    /// returning `sqrt(-2 ln u1) cos(2 pi u2)` now and the sine twin on the
    /// next call.
    pub fn normal(&mut self) -> f64 {
        if let Some(v) = self.spare_normal.take() {
            return v;
        }
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// Uniform integer in `[0, bound)` by rejection sampling (no modulo bias).
    pub fn index_below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "bound must be positive");
        let bound = bound as u64;
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % bound) as usize;
            }
        }
    }
}

/// Dense matrix in row-major storage: `entries[i * cols + j]` is row `i`,
/// column `j`. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyMatrix { rows, cols });
        }
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(DenseMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        DenseMatrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn scaled(&self, c: f64) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| c * e).collect(),
        }
    }
}

/// `m x n` matrix with i.i.d. standard normal entries, filled row-major from
/// the seeded stream.
pub fn gaussian_matrix(m: usize, n: usize, seed: RngSeed) -> Result<DenseMatrix, LinalgError> {
    if m == 0 || n == 0 {
        return Err(LinalgError::EmptyMatrix { rows: m, cols: n });
    }
    let mut rng = SeededRng::new(seed);
    let entries = (0..m * n).map(|_| rng.normal()).collect();
    DenseMatrix::new(m, n, entries)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `A x` for a length-`n` vector.
pub fn matvec(a: &DenseMatrix, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if x.len() != a.cols {
        return Err(LinalgError::DimensionMismatch {
            expected: a.cols,
            got: x.len(),
        });
    }
    let mut out = Vec::with_capacity(a.rows);
    for i in 0..a.rows {
        let row = &a.entries[i * a.cols..(i + 1) * a.cols];
        out.push(dot(row, x));
    }
    Ok(out)
}

/// `A^T y` for a length-`m` vector, accumulated row by row so the row-major
/// storage is walked sequentially.
pub fn matvec_transpose(a: &DenseMatrix, y: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if y.len() != a.rows {
        return Err(LinalgError::DimensionMismatch {
            expected: a.rows,
            got: y.len(),
        });
    }
    let mut out = vec![0.0; a.cols];
    for (i, &yi) in y.iter().enumerate() {
        let row = &a.entries[i * a.cols..(i + 1) * a.cols];
        for (o, &r) in out.iter_mut().zip(row) {
            *o += r * yi;
        }
    }
    Ok(out)
}

/// One Landweber (gradient) step on the least-squares term:
/// `z + mu A^T (b - A z)`.
pub fn landweber_step(
    a: &DenseMatrix,
    b: &[f64],
    z: &[f64],
    mu: f64,
) -> Result<Vec<f64>, LinalgError> {
    if b.len() != a.rows {
        return Err(LinalgError::DimensionMismatch {
            expected: a.rows,
            got: b.len(),
        });
    }
    let az = matvec(a, z)?;
    let residual: Vec<f64> = b.iter().zip(&az).map(|(bi, ai)| bi - ai).collect();
    let grad = matvec_transpose(a, &residual)?;
    Ok(z.iter().zip(&grad).map(|(zi, gi)| zi + mu * gi).collect())
}

const SPECTRAL_START_SEED: u64 = 0x5EED_0001;

/// Largest singular value of `A` by power iteration on the smaller Gram
/// matrix (`A A^T` when `m <= n`, else `A^T A`), from a seeded start vector.
///
/// Stops when the eigenpair residual `||G v - theta v||` drops below
/// `tol * theta`, which bounds the relative error of the returned singular
/// value by roughly `tol / 2`.
pub fn spectral_norm(a: &DenseMatrix, tol: f64, max_iter: usize) -> Result<f64, LinalgError> {
    if tol <= 0.0 {
        return Err(LinalgError::NonPositiveTolerance(tol));
    }
    if a.entries.iter().all(|&e| e == 0.0) {
        return Err(LinalgError::ZeroMatrix);
    }
    let use_left = a.rows <= a.cols;
    let dim = a.rows.min(a.cols);

    let mut rng = SeededRng::new(RngSeed(SPECTRAL_START_SEED));
    let mut v: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
    let vn = norm2(&v);
    for vi in &mut v {
        *vi /= vn;
    }

    let apply_gram = |v: &[f64]| -> Result<Vec<f64>, LinalgError> {
        if use_left {
            matvec(a, &matvec_transpose(a, v)?)
        } else {
            matvec_transpose(a, &matvec(a, v)?)
        }
    };

    let mut theta = 0.0;
    for _ in 0..max_iter {
        let w = apply_gram(&v)?;
        theta = dot(&v, &w);
        let residual: f64 = v
            .iter()
            .zip(&w)
            .map(|(vi, wi)| (wi - theta * vi).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * theta {
            return Ok(theta.sqrt());
        }
        let wn = norm2(&w);
        if wn == 0.0 {
            // Start vector fell in the null space; nothing to iterate on.
            return Err(LinalgError::PowerIterationNoConvergence {
                estimate: 0.0,
                iterations: 0,
            });
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
    }
    Err(LinalgError::PowerIterationNoConvergence {
        estimate: theta.max(0.0).sqrt(),
        iterations: max_iter,
    })
}

/// Absolute values of a vector sorted nonincreasing, plus the permutation of
/// source indices that produced the order.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    pub values: Vec<f64>,
    pub permutation: Vec<usize>,
}

/// Nonincreasing rearrangement of `|x|`. Ties break by ascending source
/// index, so the result is unique and runs are reproducible.
pub fn nonincreasing_rearrangement(x: &[f64]) -> Rearrangement {
    let mut permutation: Vec<usize> = (0..x.len()).collect();
    permutation.sort_unstable_by(|&i, &j| {
        match x[j].abs().total_cmp(&x[i].abs()) {
            Ordering::Equal => i.cmp(&j),
            ord => ord,
        }
    });
    let values = permutation.iter().map(|&i| x[i].abs()).collect();
    Rearrangement {
        values,
        permutation,
    }
}

fn fmt_entry(x: f64) -> String {
    // 17 fractional digits in scientific notation: 18 significant digits,
    // enough to round-trip any f64.
    format!("{x:.17e}")
}

fn io_err(path: &Path, source: std::io::Error) -> LinalgError {
    LinalgError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes a matrix as CSV, one row per line, entries with 18 significant
/// digits so a read-back is bit-exact.
pub fn write_matrix_csv(path: &Path, a: &DenseMatrix) -> Result<(), LinalgError> {
    let mut out = String::new();
    for i in 0..a.rows() {
        let row = &a.entries()[i * a.cols()..(i + 1) * a.cols()];
        let line: Vec<String> = row.iter().map(|&e| fmt_entry(e)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Writes a vector as a single CSV line.
pub fn write_vector_csv(path: &Path, x: &[f64]) -> Result<(), LinalgError> {
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let line: Vec<String> = x.iter().map(|&e| fmt_entry(e)).collect();
    writeln!(file, "{}", line.join(",")).map_err(|e| io_err(path, e))
}

fn parse_csv_numbers(path: &Path) -> Result<Vec<Vec<f64>>, LinalgError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for token in line.split(',') {
            let token = token.trim();
            let value: f64 = token.parse().map_err(|_| LinalgError::CsvParse {
                path: path.display().to_string(),
                line: lineno + 1,
                token: token.to_string(),
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_matrix_csv(path: &Path) -> Result<DenseMatrix, LinalgError> {
    let rows = parse_csv_numbers(path)?;
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    for row in &rows {
        if row.len() != n {
            return Err(LinalgError::EntryCount {
                rows: m,
                cols: n,
                expected: m * n,
                got: rows.iter().map(Vec::len).sum(),
            });
        }
    }
    DenseMatrix::new(m, n, rows.into_iter().flatten().collect())
}

pub fn read_vector_csv(path: &Path) -> Result<Vec<f64>, LinalgError> {
    let rows = parse_csv_numbers(path)?;
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_matrix_is_deterministic_per_seed() {
        let a = gaussian_matrix(2, 3, RngSeed(7)).unwrap();
        let b = gaussian_matrix(2, 3, RngSeed(7)).unwrap();
        assert_eq!(a, b);
        let c = gaussian_matrix(2, 3, RngSeed(8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_matrix_moments_match_standard_normal() {
        let a = gaussian_matrix(128, 512, RngSeed(42)).unwrap();
        let n = a.entries().len() as f64;
        let mean: f64 = a.entries().iter().sum::<f64>() / n;
        let var: f64 = a.entries().iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
        assert!(mean.abs() < 0.05, "sample mean {mean}");
        assert!((var - 1.0).abs() < 0.1, "sample variance {var}");
    }

    #[test]
    fn gaussian_matrix_rejects_empty_dimensions() {
        assert!(matches!(
            gaussian_matrix(0, 5, RngSeed(1)),
            Err(LinalgError::EmptyMatrix { .. })
        ));
        assert!(matches!(
            gaussian_matrix(5, 0, RngSeed(1)),
            Err(LinalgError::EmptyMatrix { .. })
        ));
    }

    #[test]
    fn matvec_identity_and_hand_examples() {
        let eye = DenseMatrix::identity(2);
        assert_eq!(matvec(&eye, &[3.0, -1.0]).unwrap(), vec![3.0, -1.0]);

        let a = DenseMatrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(matvec(&a, &[1.0, 1.0]).unwrap(), vec![3.0, 7.0]);
        assert_eq!(matvec_transpose(&a, &[1.0, 0.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn matvec_rejects_dimension_mismatch() {
        let a = DenseMatrix::new(2, 3, vec![0.0; 6]).unwrap();
        assert!(matvec(&a, &[1.0, 2.0]).is_err());
        assert!(matvec_transpose(&a, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn landweber_fixed_point_at_zero_residual() {
        let a = gaussian_matrix(4, 6, RngSeed(3)).unwrap();
        let z = vec![0.5, -1.0, 0.0, 2.0, 0.0, 1.0];
        let b = matvec(&a, &z).unwrap();
        let stepped = landweber_step(&a, &b, &z, 0.3).unwrap();
        for (s, zi) in stepped.iter().zip(&z) {
            assert!((s - zi).abs() < 1e-12);
        }
    }

    #[test]
    fn landweber_hand_example() {
        let eye = DenseMatrix::identity(2);
        let out = landweber_step(&eye, &[1.0, 1.0], &[0.0, 0.0], 0.5).unwrap();
        assert_eq!(out, vec![0.5, 0.5]);
    }

    #[test]
    fn landweber_matches_composition_bitwise() {
        let a = gaussian_matrix(5, 9, RngSeed(11)).unwrap();
        let mut rng = SeededRng::new(RngSeed(12));
        let z: Vec<f64> = (0..9).map(|_| rng.normal()).collect();
        let b: Vec<f64> = (0..5).map(|_| rng.normal()).collect();
        let mu = 0.37;
        let direct = landweber_step(&a, &b, &z, mu).unwrap();
        let az = matvec(&a, &z).unwrap();
        let residual: Vec<f64> = b.iter().zip(&az).map(|(bi, ai)| bi - ai).collect();
        let grad = matvec_transpose(&a, &residual).unwrap();
        let composed: Vec<f64> = z.iter().zip(&grad).map(|(zi, gi)| zi + mu * gi).collect();
        assert_eq!(direct, composed);
    }

    #[test]
    fn landweber_step_norm_bound() {
        let a = gaussian_matrix(6, 10, RngSeed(21)).unwrap();
        let sigma = spectral_norm(&a, 1e-10, 1000).unwrap();
        let mut rng = SeededRng::new(RngSeed(22));
        for _ in 0..20 {
            let z: Vec<f64> = (0..10).map(|_| rng.normal()).collect();
            let b: Vec<f64> = (0..6).map(|_| rng.normal()).collect();
            let mu = 0.1 + rng.uniform();
            let stepped = landweber_step(&a, &b, &z, mu).unwrap();
            let moved: Vec<f64> = stepped.iter().zip(&z).map(|(s, zi)| s - zi).collect();
            let az = matvec(&a, &z).unwrap();
            let resid: Vec<f64> = b.iter().zip(&az).map(|(bi, ai)| bi - ai).collect();
            let bound = mu * sigma * norm2(&resid);
            assert!(norm2(&moved) <= bound * (1.0 + 1e-9));
        }
    }

    #[test]
    fn spectral_norm_identity_and_diagonal() {
        let eye = DenseMatrix::identity(3);
        let s = spectral_norm(&eye, 1e-10, 1000).unwrap();
        assert!((s - 1.0).abs() < 1e-9);

        let d = DenseMatrix::new(
            3,
            3,
            vec![3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5],
        )
        .unwrap();
        let s = spectral_norm(&d, 1e-10, 1000).unwrap();
        assert!((s - 3.0).abs() < 1e-9);
    }

    #[test]
    fn spectral_norm_rejects_bad_inputs() {
        let zero = DenseMatrix::new(2, 2, vec![0.0; 4]).unwrap();
        assert!(matches!(
            spectral_norm(&zero, 1e-10, 100),
            Err(LinalgError::ZeroMatrix)
        ));
        let eye = DenseMatrix::identity(2);
        assert!(matches!(
            spectral_norm(&eye, 0.0, 100),
            Err(LinalgError::NonPositiveTolerance(_))
        ));
    }

    /// Jacobi eigenvalue iteration on a symmetric matrix; the independent
    /// check for the power-iteration result.
    #[allow(clippy::needless_range_loop, clippy::ptr_arg)]
    fn jacobi_max_eigenvalue(g: &mut Vec<Vec<f64>>) -> f64 {
        let n = g.len();
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += g[i][j] * g[i][j];
                }
            }
            if off.sqrt() < 1e-14 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    if g[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (g[q][q] - g[p][p]) / (2.0 * g[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let gkp = g[k][p];
                        let gkq = g[k][q];
                        g[k][p] = c * gkp - s * gkq;
                        g[k][q] = s * gkp + c * gkq;
                    }
                    for k in 0..n {
                        let gpk = g[p][k];
                        let gqk = g[q][k];
                        g[p][k] = c * gpk - s * gqk;
                        g[q][k] = s * gpk + c * gqk;
                    }
                }
            }
        }
        (0..n).map(|i| g[i][i]).fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn spectral_norm_matches_jacobi_oracle() {
        let a = gaussian_matrix(20, 50, RngSeed(99)).unwrap();
        let mut gram = vec![vec![0.0; 20]; 20];
        for (i, row) in gram.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut sum = 0.0;
                for k in 0..50 {
                    sum += a.get(i, k) * a.get(j, k);
                }
                *cell = sum;
            }
        }
        let expected = jacobi_max_eigenvalue(&mut gram).sqrt();
        let got = spectral_norm(&a, 1e-10, 1000).unwrap();
        assert!(
            ((got - expected) / expected).abs() < 1e-8,
            "power iteration {got} vs Jacobi oracle {expected}"
        );
    }

    #[test]
    fn spectral_norm_scales_homogeneously() {
        let a = gaussian_matrix(8, 15, RngSeed(5)).unwrap();
        let tol = 1e-10;
        let s1 = spectral_norm(&a, tol, 1000).unwrap();
        for c in [-3.0, 0.25, 7.5] {
            let s2 = spectral_norm(&a.scaled(c), tol, 1000).unwrap();
            assert!(((s2 - c.abs() * s1) / s2).abs() < 2.0 * tol.max(1e-12));
        }
    }

    #[test]
    fn rearrangement_examples() {
        let r = nonincreasing_rearrangement(&[3.0, -5.0, 0.0, 4.0]);
        assert_eq!(r.values, vec![5.0, 4.0, 3.0, 0.0]);
        assert_eq!(r.permutation, vec![1, 3, 0, 2]);

        let r = nonincreasing_rearrangement(&[0.0, 0.0, 0.0]);
        assert_eq!(r.values, vec![0.0, 0.0, 0.0]);
        assert_eq!(r.permutation, vec![0, 1, 2]);

        let r = nonincreasing_rearrangement(&[-2.0, 2.0]);
        assert_eq!(r.values, vec![2.0, 2.0]);
        assert_eq!(r.permutation, vec![0, 1]);
    }

    #[test]
    fn rearrangement_round_trip_recovers_magnitudes() {
        let mut rng = SeededRng::new(RngSeed(1234));
        for _ in 0..100 {
            let x: Vec<f64> = (0..37).map(|_| rng.normal()).collect();
            let r = nonincreasing_rearrangement(&x);
            let mut recovered = vec![0.0; x.len()];
            for (i, &src) in r.permutation.iter().enumerate() {
                recovered[src] = r.values[i];
            }
            for (rec, xi) in recovered.iter().zip(&x) {
                assert_eq!(*rec, xi.abs());
            }
        }
    }

    #[test]
    fn seed_derivation_separates_roles() {
        let base = RngSeed(17);
        let a = derive_seed(base, &[1, 4, 9]);
        let b = derive_seed(base, &[2, 4, 9]);
        let c = derive_seed(base, &[1, 4, 9]);
        assert_eq!(a, c);
        assert_ne!(a, b);
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let a = gaussian_matrix(3, 4, RngSeed(55)).unwrap();
        let path = dir.path().join("a.csv");
        write_matrix_csv(&path, &a).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(a, back);

        let v = vec![1.0 / 3.0, -2.5e-17, 1e300];
        let vpath = dir.path().join("v.csv");
        write_vector_csv(&vpath, &v).unwrap();
        assert_eq!(read_vector_csv(&vpath).unwrap(), v);
    }
}
