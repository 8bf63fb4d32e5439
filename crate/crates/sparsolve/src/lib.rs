//! Iterative thresholding solvers for sparse signal recovery.
//!
//! The library recovers sparse vectors from underdetermined linear
//! measurements `b = A z` by iterative thresholding. Six algorithm families
//! are provided - `hard`, `soft`, `half`, `two_thirds`, and the
//! smoothed-penalty `half_eps` / `two_thirds_eps` variants with adaptive
//! per-component weights - together with a deterministic benchmark harness
//! that sweeps sparsity levels and reports recovery success rates.

pub mod config;
pub mod experiment;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod solver;
pub mod thresholding;

pub use linalg::{DenseMatrix, RngSeed};
pub use solver::{SolverConfig, SolverResult, ThresholdingRule};
