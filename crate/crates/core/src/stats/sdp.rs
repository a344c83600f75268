//! Semidefinite relaxation
//! `SDP_k(A) = max { Tr(AZ) : Z >= 0, Tr Z = 1, |Z|_1 <= k }`
//! solved by ADMM with a certified interval.
//!
//! The iteration splits `Z = W` with `Z` on the spectahedron and `W` in the
//! l1 ball of radius `k`:
//!
//! ```text
//! Z <- Proj_spec(W - Y + A / rho)
//! W <- Proj_l1(Z + Y)
//! Y <- Y + Z - W
//! ```
//!
//! Certificates do not rely on convergence. For any symmetric `U`,
//! `SDP_k(A) <= lambda_max(A - U) + k |U|_inf`; the scaled multiplier
//! `U = rho Y` makes this tight at the fixed point. Any spectahedron point can
//! be mixed with `I/p` (which has `|I/p|_1 = 1 < k`) until it satisfies the l1
//! budget, which gives a feasible value from below.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::projection::{project_l1_ball, project_spectahedron};
use super::{check_k, diag_stat, StatKind, StatValue};
use crate::error::{invalid, Error, Result};
use crate::matrix::{eigen_dense, lanczos_largest, SymMatrix, DEFAULT_EIGEN_TOL, JACOBI_MAX_DIM};

/// Penalty update between rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Keep the initial penalty throughout.
    Fixed,
    /// Rebalance the penalty from the primal and dual residuals.
    Backtracking,
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepRule::Fixed => "fixed",
            StepRule::Backtracking => "backtracking",
        })
    }
}

impl FromStr for StepRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fixed" => Ok(StepRule::Fixed),
            "backtracking" => Ok(StepRule::Backtracking),
            other => Err(invalid(format!("unknown step rule {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpSolverConfig {
    /// Target half-width of the certified interval.
    pub eps: f64,
    /// Rounds; certificates are evaluated once per round.
    pub max_outer: usize,
    /// ADMM iterations per round.
    pub max_inner: usize,
    pub step_rule: StepRule,
}

impl Default for SdpSolverConfig {
    fn default() -> Self {
        SdpSolverConfig {
            eps: 1e-3,
            max_outer: 400,
            max_inner: 25,
            step_rule: StepRule::Backtracking,
        }
    }
}

impl SdpSolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(invalid(format!("eps must be positive, got {}", self.eps)));
        }
        if self.max_outer < 1 || self.max_inner < 1 {
            return Err(invalid("iteration caps must be at least 1"));
        }
        Ok(())
    }
}

fn top_dense(m: Vec<f64>, p: usize) -> Result<f64> {
    if p <= JACOBI_MAX_DIM {
        return Ok(eigen_dense(m, p).values[0]);
    }
    let mv = |x: &[f64], y: &mut [f64]| {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = m[i * p..(i + 1) * p].iter().zip(x).map(|(a, b)| a * b).sum();
        }
    };
    // the certificate must be an upper bound: pad by the solver tolerance
    let pair = lanczos_largest(mv, p, None, DEFAULT_EIGEN_TOL)?;
    Ok(pair.value + 2.0 * DEFAULT_EIGEN_TOL * (1.0 + pair.value.abs()))
}

/// `lambda_max(A - U) + k |U|_inf`.
fn dual_bound(a: &[f64], u: &[f64], p: usize, k: f64) -> Result<f64> {
    let m: Vec<f64> = a.iter().zip(u).map(|(x, y)| x - y).collect();
    let norm = u.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    Ok(top_dense(m, p)? + k * norm)
}

/// Feasible value from a spectahedron point `z`.
fn primal_bound(a: &[f64], z: &[f64], p: usize, k: f64, trace_a: f64) -> f64 {
    let l1: f64 = z.iter().map(|x| x.abs()).sum();
    let value: f64 = a.iter().zip(z).map(|(x, y)| x * y).sum();
    if l1 <= k {
        return value;
    }
    let t = (l1 - k) / (l1 - 1.0);
    (1.0 - t) * value + t * trace_a / p as f64
}

fn frob(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Solves the relaxation to a certified interval of width at most `2 eps`.
///
/// `A` must be positive semidefinite; unflagged input is checked numerically.
/// `k = 1` reduces to the largest diagonal entry and `k = p` to
/// `lambda_max(A)`, since `|Z|_1 <= p Tr Z` on the spectahedron.
pub fn sdp(a: &SymMatrix, k: usize, cfg: &SdpSolverConfig) -> Result<StatValue> {
    a.ensure_finite()?;
    let p = a.dim();
    check_k(k, p)?;
    cfg.validate()?;
    if !a.is_psd_flagged() && !a.check_psd()? {
        return Err(invalid("the SDP statistic requires a positive semidefinite matrix"));
    }
    let exact = |v: f64| StatValue {
        lower_cert: Some(v),
        upper_cert: Some(v),
        ..StatValue::plain(StatKind::Sdp, v)
    };
    if k == 1 {
        return Ok(exact(diag_stat(a).value));
    }
    let dense = a.to_dense();
    if k == p {
        return Ok(exact(top_dense(dense, p)?));
    }

    let kf = k as f64;
    let trace_a = a.trace();
    let mut rho = a.max_abs().max(1e-12);
    let mut w = vec![0.0; p * p];
    let mut y = vec![0.0; p * p];
    let mut v = vec![0.0; p * p];
    let zero = vec![0.0; p * p];
    let mut upper = dual_bound(&dense, &zero, p, kf)?;
    let mut lower = f64::NEG_INFINITY;
    let mut iterations = 0;

    for _round in 0..cfg.max_outer {
        let mut z = Vec::new();
        let mut w_prev = w.clone();
        for _ in 0..cfg.max_inner {
            for (((vi, wi), yi), ai) in v.iter_mut().zip(&w).zip(&y).zip(&dense) {
                *vi = wi - yi + ai / rho;
            }
            z = project_spectahedron(&v, p);
            w_prev.copy_from_slice(&w);
            for ((wi, zi), yi) in w.iter_mut().zip(&z).zip(&y) {
                *wi = zi + yi;
            }
            project_l1_ball(&mut w, kf);
            for ((yi, zi), wi) in y.iter_mut().zip(&z).zip(&w) {
                *yi += zi - wi;
            }
            iterations += 1;
        }

        lower = lower.max(primal_bound(&dense, &z, p, kf, trace_a));
        let u: Vec<f64> = y.iter().map(|x| rho * x).collect();
        upper = upper.min(dual_bound(&dense, &u, p, kf)?);
        if upper - lower <= 2.0 * cfg.eps {
            let value = 0.5 * (upper + lower);
            // both bounds agree up to rounding when they cross
            let (lower, upper) = if lower > upper { (value, value) } else { (lower, upper) };
            return Ok(StatValue {
                lower_cert: Some(lower),
                upper_cert: Some(upper),
                iterations,
                ..StatValue::plain(StatKind::Sdp, value)
            });
        }

        if cfg.step_rule == StepRule::Backtracking {
            let r = frob(&z, &w);
            let s = rho * frob(&w, &w_prev);
            if r > 10.0 * s {
                rho *= 2.0;
                y.iter_mut().for_each(|x| *x /= 2.0);
            } else if s > 10.0 * r {
                rho /= 2.0;
                y.iter_mut().for_each(|x| *x *= 2.0);
            }
        }
    }
    Err(Error::NotConverged {
        lower,
        upper,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{lambda_k_max, mdp, DEFAULT_GRID_SIZE};

    fn wishart(p: usize, n: usize, seed: u64) -> SymMatrix {
        let mut r = crate::rng::Seed::new(seed, 1).rng();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| r.gaussian()).collect())
            .collect();
        crate::matrix::empirical_covariance(&crate::matrix::DataMatrix::from_rows(&rows).unwrap())
            .unwrap()
    }

    fn check_interval(s: &StatValue, eps: f64) {
        let (lo, hi) = (s.lower_cert.unwrap(), s.upper_cert.unwrap());
        assert!(lo <= s.value && s.value <= hi);
        assert!(hi - lo <= 2.0 * eps + 1e-15);
    }

    #[test]
    fn identity_is_one() {
        let cfg = SdpSolverConfig::default();
        let s = sdp(&SymMatrix::identity(6), 3, &cfg).unwrap();
        check_interval(&s, cfg.eps);
        assert!((s.value - 1.0).abs() <= cfg.eps);
    }

    #[test]
    fn sparse_spike_is_tight() {
        let mut v = vec![0.0; 9];
        v[1] = 0.6;
        v[4] = -0.48;
        v[7] = 0.64;
        let a = SymMatrix::spiked_identity(&v, 0.5).with_psd_flag(true);
        let cfg = SdpSolverConfig {
            eps: 1e-5,
            ..Default::default()
        };
        let s = sdp(&a, 3, &cfg).unwrap();
        check_interval(&s, cfg.eps);
        assert!((s.value - 1.5).abs() <= 2.0 * cfg.eps, "{s:?}");
    }

    #[test]
    fn sandwiched_between_lambda_k_and_mdp() {
        let cfg = SdpSolverConfig::default();
        for seed in 0..4 {
            let a = wishart(15, 30, seed);
            let s = sdp(&a, 3, &cfg).unwrap();
            check_interval(&s, cfg.eps);
            let lk = lambda_k_max(&a, 3).unwrap().value;
            let m = mdp(&a, 3, DEFAULT_GRID_SIZE).unwrap().value;
            assert!(lk <= s.upper_cert.unwrap() + 1e-12);
            assert!(s.lower_cert.unwrap() <= m + 1e-9);
            assert!(lk <= s.value + cfg.eps && s.value <= m + cfg.eps);
        }
    }

    #[test]
    fn fixed_step_also_certifies() {
        let a = wishart(8, 20, 9);
        let cfg = SdpSolverConfig {
            step_rule: StepRule::Fixed,
            ..Default::default()
        };
        match sdp(&a, 2, &cfg) {
            Ok(s) => check_interval(&s, cfg.eps),
            Err(Error::NotConverged { lower, upper, .. }) => assert!(lower <= upper),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn special_cases_and_errors() {
        let a = wishart(6, 12, 3);
        let cfg = SdpSolverConfig::default();
        assert_eq!(sdp(&a, 1, &cfg).unwrap().value, diag_stat(&a).value);
        let top = crate::matrix::largest_eigenvalue(&a, 1e-12).unwrap().value;
        assert!((sdp(&a, 6, &cfg).unwrap().value - top).abs() < 1e-10);

        let indefinite = SymMatrix::diagonal(&[1.0, -1.0, 0.5]).unwrap();
        assert!(sdp(&indefinite, 2, &cfg).is_err());
        let bad = SdpSolverConfig {
            eps: 0.0,
            ..Default::default()
        };
        assert!(sdp(&a, 2, &bad).is_err());
    }

    #[test]
    fn nonconvergence_reports_interval() {
        let a = wishart(10, 15, 4);
        let cfg = SdpSolverConfig {
            eps: 1e-12,
            max_outer: 1,
            max_inner: 1,
            step_rule: StepRule::Fixed,
        };
        match sdp(&a, 3, &cfg) {
            Err(Error::NotConverged { lower, upper, iterations }) => {
                assert!(lower <= upper);
                assert_eq!(iterations, 1);
            }
            other => panic!("expected nonconvergence, got {other:?}"),
        }
    }
}
