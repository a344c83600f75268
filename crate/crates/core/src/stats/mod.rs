//! Test statistics for sparse principal component detection.
//!
//! * [`lambda_k_max`]: exact k-sparse largest eigenvalue by exhaustive search.
//! * [`sdp`]: semidefinite relaxation with a certified interval.
//! * [`mdp`]: minimum dual perturbation, a 1-D minimization over the
//!   soft-threshold level.
//! * [`diag_stat`]: largest diagonal entry.
//!
//! For PSD input they are ordered as
//! `diag <= lambda_k_max <= sdp <= mdp`.

mod lambda_k;
mod lq;
mod mdp;
pub(crate) mod projection;
mod sdp;

pub use lambda_k::{
    binomial, lambda_k_exceeds, lambda_k_max, lambda_k_max_with_budget, RevolvingDoor,
    DEFAULT_ENUMERATION_BUDGET,
};
pub use lq::{k_q, lq_norm, sparse_truncate};
pub use mdp::{mdp, mdp_objective, DEFAULT_GRID_SIZE};
pub use sdp::{sdp, SdpSolverConfig, StepRule};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatKind {
    LambdaK,
    Sdp,
    Mdp,
    Diag,
}

impl StatKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StatKind::LambdaK => "lambda_k",
            StatKind::Sdp => "sdp",
            StatKind::Mdp => "mdp",
            StatKind::Diag => "diag",
        }
    }
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lambda_k" | "lambdak" | "lambda" => Ok(StatKind::LambdaK),
            "sdp" => Ok(StatKind::Sdp),
            "mdp" => Ok(StatKind::Mdp),
            "diag" | "d" => Ok(StatKind::Diag),
            other => Err(Error::InvalidArgument(format!("unknown statistic {other:?}"))),
        }
    }
}

/// Value of a test statistic together with its by-products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatValue {
    pub name: StatKind,
    pub value: f64,
    /// Attaining support (0-based) for `lambda_k`, argmax index for `diag`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<usize>>,
    /// Minimizing soft-threshold level for `mdp`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_cert: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_cert: Option<f64>,
    pub iterations: usize,
}

impl StatValue {
    pub(crate) fn plain(name: StatKind, value: f64) -> Self {
        StatValue {
            name,
            value,
            support: None,
            z_star: None,
            lower_cert: None,
            upper_cert: None,
            iterations: 0,
        }
    }
}

/// Johnstone's diagonal statistic `max_i A_ii`; ties go to the smallest index.
pub fn diag_stat(a: &SymMatrix) -> StatValue {
    let mut best = 0;
    for i in 1..a.dim() {
        if a.get(i, i) > a.get(best, best) {
            best = i;
        }
    }
    StatValue {
        support: Some(vec![best]),
        ..StatValue::plain(StatKind::Diag, a.get(best, best))
    }
}

/// Options shared by [`compute`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatOptions {
    pub grid_size: usize,
    pub sdp: SdpSolverConfig,
    pub enumeration_budget: u128,
}

impl Default for StatOptions {
    fn default() -> Self {
        StatOptions {
            grid_size: DEFAULT_GRID_SIZE,
            sdp: SdpSolverConfig::default(),
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
        }
    }
}

/// Dispatches on the statistic kind.
pub fn compute(kind: StatKind, a: &SymMatrix, k: usize, opts: &StatOptions) -> Result<StatValue> {
    match kind {
        StatKind::LambdaK => lambda_k_max_with_budget(a, k, opts.enumeration_budget),
        StatKind::Sdp => sdp(a, k, &opts.sdp),
        StatKind::Mdp => mdp(a, k, opts.grid_size),
        StatKind::Diag => Ok(diag_stat(a)),
    }
}

pub(crate) fn check_k(k: usize, p: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidArgument("sparsity k must be at least 1".into()));
    }
    if k > p {
        return Err(Error::InvalidArgument(format!("sparsity k = {k} exceeds dimension p = {p}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_examples() {
        assert_eq!(diag_stat(&SymMatrix::identity(5)).value, 1.0);
        let d = SymMatrix::diagonal(&[1.0, 2.5, 0.3]).unwrap();
        let s = diag_stat(&d);
        assert_eq!(s.value, 2.5);
        assert_eq!(s.support, Some(vec![1]));
        let tie = SymMatrix::diagonal(&[2.0, 1.0, 2.0]).unwrap();
        assert_eq!(diag_stat(&tie).support, Some(vec![0]));
    }

    #[test]
    fn stat_kind_parses() {
        assert_eq!("MDP".parse::<StatKind>().unwrap(), StatKind::Mdp);
        assert_eq!("lambda_k".parse::<StatKind>().unwrap(), StatKind::LambdaK);
        assert!("foo".parse::<StatKind>().is_err());
    }
}
