//! Detection of sparse principal components in high-dimensional covariance
//! matrices.
//!
//! The crate provides four test statistics for the spiked covariance model
//! (the exhaustive k-sparse eigenvalue, its semidefinite relaxation, the
//! minimum dual perturbation and the diagonal statistic), closed-form detection
//! thresholds, seeded samplers for every data model, and a Monte Carlo harness.

pub mod error;
pub mod matrix;
pub mod rng;
pub mod stats;
pub mod detection;
pub mod experiments;
pub mod models;

pub use error::{Error, Result};
pub use matrix::{empirical_covariance, largest_eigenvalue, DataMatrix, SymMatrix};

/// Formats a float with 17 significant digits, enough to round-trip exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}
