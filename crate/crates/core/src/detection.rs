//! Detection thresholds and the test rule `psi = 1{stat > tau}`.
//!
//! All logarithms are natural.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::matrix::SymMatrix;
use crate::stats::{compute, StatKind, StatOptions, StatValue};

/// Parameters of a detection problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub p: usize,
    pub n: usize,
    pub k: usize,
    /// Error probability, in `(0, 1]` (`1` only for limiting checks).
    pub delta: f64,
    /// Signal strength used by the alternative quantile.
    pub theta: f64,
    pub statistic: StatKind,
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p < 1 || self.n < 1 || self.k < 1 {
            return Err(invalid("p, n and k must be at least 1"));
        }
        if self.k > self.p {
            return Err(invalid(format!("k = {} exceeds p = {}", self.k, self.p)));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(invalid(format!("delta must lie in (0, 1], got {}", self.delta)));
        }
        if !(self.theta >= 0.0) || !self.theta.is_finite() {
            return Err(invalid(format!("theta must be finite and >= 0, got {}", self.theta)));
        }
        Ok(())
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `sqrt(log(1/delta) / n)`.
    fn s(&self) -> f64 {
        ((1.0 / self.delta).ln() / self.nf()).sqrt()
    }
}

/// Null and alternative quantiles of a statistic and the detection level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub tau0: f64,
    pub tau1: f64,
    pub theta_bar: f64,
    pub feasible: bool,
}

impl Thresholds {
    fn new(tau0: f64, tau1: f64, theta_bar: f64) -> Self {
        Thresholds {
            tau0,
            tau1,
            theta_bar,
            feasible: tau1 > tau0,
        }
    }
}

/// `1 + theta - 2 (1 + theta) sqrt(log(1/delta)/n)`, the lower quantile of
/// `lambda^k_max` and of its relaxations under the alternative.
fn alt_quantile(cfg: &TestConfig) -> f64 {
    1.0 + cfg.theta - 2.0 * (1.0 + cfg.theta) * cfg.s()
}

/// Thresholds for the exhaustive statistic `lambda^k_max`.
pub fn thresholds_lambda(cfg: &TestConfig) -> Result<Thresholds> {
    cfg.validate()?;
    let (p, k, n) = (cfg.p as f64, cfg.k as f64, cfg.nf());
    let l = k * (9.0 * std::f64::consts::E * p / k).ln() + (1.0 / cfg.delta).ln();
    let dev = 4.0 * (l / n).sqrt() + 4.0 * l / n;
    Ok(Thresholds::new(1.0 + dev, alt_quantile(cfg), dev + 4.0 * cfg.s()))
}

/// Thresholds shared by the SDP and MDP statistics.
pub fn thresholds_sdp(cfg: &TestConfig) -> Result<Thresholds> {
    cfg.validate()?;
    let (p, k, n) = (cfg.p as f64, cfg.k as f64, cfg.nf());
    let a = (4.0 * p * p / cfg.delta).ln();
    let b = (2.0 * p / cfg.delta).ln();
    let dev = 2.0 * (k * k * a / n).sqrt() + 2.0 * k * a / n + 2.0 * (b / n).sqrt() + 2.0 * b / n;
    Ok(Thresholds::new(1.0 + dev, alt_quantile(cfg), dev + 4.0 * cfg.s()))
}

/// Bounds for the diagonal statistic, named by role.
///
/// The usual presentation of these two quantiles carries swapped subscripts
/// (the "null" one contains `theta`); here `null_bound` is the quantity that
/// controls the statistic under the null.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagThresholds {
    /// `1 + 2 sqrt(log(p/delta)/n) + 2 log(p/delta)/n`.
    pub null_bound: f64,
    /// `1 + theta/k - 2 (1 + theta/k) sqrt(log(1/delta)/n)`.
    pub alt_bound: f64,
    /// Smallest `theta` with `alt_bound > null_bound`; infinite when
    /// `sqrt(log(1/delta)/n) >= 1/2`.
    pub theta_bar: f64,
    pub feasible: bool,
}

impl From<DiagThresholds> for Thresholds {
    fn from(d: DiagThresholds) -> Self {
        Thresholds {
            tau0: d.null_bound,
            tau1: d.alt_bound,
            theta_bar: d.theta_bar,
            feasible: d.feasible,
        }
    }
}

pub fn thresholds_diag(cfg: &TestConfig) -> Result<DiagThresholds> {
    cfg.validate()?;
    let (p, k, n) = (cfg.p as f64, cfg.k as f64, cfg.nf());
    let lp = (p / cfg.delta).ln();
    let null_bound = 1.0 + 2.0 * (lp / n).sqrt() + 2.0 * lp / n;
    let t = cfg.theta / k;
    let s = cfg.s();
    let alt_bound = 1.0 + t - 2.0 * (1.0 + t) * s;
    let theta_bar = if 2.0 * s < 1.0 {
        k * (null_bound - 1.0 + 2.0 * s) / (1.0 - 2.0 * s)
    } else {
        f64::INFINITY
    };
    Ok(DiagThresholds {
        null_bound,
        alt_bound,
        theta_bar,
        feasible: alt_bound > null_bound,
    })
}

/// Thresholds matching `cfg.statistic`.
pub fn thresholds_for(cfg: &TestConfig) -> Result<Thresholds> {
    match cfg.statistic {
        StatKind::LambdaK => thresholds_lambda(cfg),
        StatKind::Sdp | StatKind::Mdp => thresholds_sdp(cfg),
        StatKind::Diag => thresholds_diag(cfg).map(Into::into),
    }
}

/// `C_nu = log[(1 + 8 nu^2) min log(e / (2 - 4 nu))]`.
pub fn c_nu(nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < 0.5) {
        return Err(invalid(format!("nu must lie in (0, 1/2), got {nu}")));
    }
    let inner = (1.0 + 8.0 * nu * nu).min((std::f64::consts::E / (2.0 - 4.0 * nu)).ln());
    Ok(inner.ln())
}

/// Minimax lower detection level
/// `sqrt(k log(C_nu p / k^2 + 1) / n) min 1/sqrt(2)`.
///
/// `C_nu` is positive only for `nu > 1/4`; smaller `nu` is rejected.
pub fn detection_lower_bound(nu: f64, p: usize, n: usize, k: usize) -> Result<f64> {
    let c = c_nu(nu)?;
    if c <= 0.0 {
        return Err(invalid(format!(
            "C_nu = {c} is not positive for nu = {nu}; the bound needs nu > 1/4"
        )));
    }
    if p < 1 || n < 1 || k < 1 {
        return Err(invalid("p, n and k must be at least 1"));
    }
    let (p, n, k) = (p as f64, n as f64, k as f64);
    Ok((k * (c * p / (k * k) + 1.0).ln() / n).sqrt().min(std::f64::consts::FRAC_1_SQRT_2))
}

/// Quantiles for sub-Gaussian data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubGaussianThresholds {
    /// Lower quantile of all statistics under the alternative (`theta <= 1`).
    pub alt_bound: f64,
    /// Upper quantile of `lambda^k_max` under the null.
    pub null_lambda: f64,
    /// Upper quantile of SDP and MDP under the null.
    pub null_convex: f64,
}

pub fn sub_gaussian_thresholds(cfg: &TestConfig) -> Result<SubGaussianThresholds> {
    cfg.validate()?;
    if cfg.theta > 1.0 {
        return Err(invalid(format!(
            "the sub-Gaussian alternative bound requires theta <= 1, got {}",
            cfg.theta
        )));
    }
    let (p, k, n) = (cfg.p as f64, cfg.k as f64, cfg.nf());
    let l2 = (2.0 / cfg.delta).ln();
    let alt_bound = 1.0 + cfg.theta - 6.0 * (64.0 * l2 / n + 32.0 * (l2 / n).sqrt());
    let lk = k * (9.0 * std::f64::consts::E * p / k).ln() + l2;
    let null_lambda = 1.0 + 352.0 * (2.0 * lk / n + (lk / n).sqrt());
    let a = (4.0 * p * p / cfg.delta).ln();
    let null_convex = 1.0 + 6.0 * (64.0 * (k * k * a / n).sqrt() + 128.0 * k * a / n);
    Ok(SubGaussianThresholds {
        alt_bound,
        null_lambda,
        null_convex,
    })
}

/// `delta / |K|` for a union over several sparsity levels.
pub fn bonferroni(delta: f64, levels: usize) -> Result<f64> {
    if levels == 0 {
        return Err(invalid("need at least one sparsity level"));
    }
    Ok(delta / levels as f64)
}

/// Which point of `[tau0, tau1]` to test at.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauRule {
    /// The null quantile `tau0` (most powerful conservative choice).
    #[default]
    Null,
    /// The alternative quantile `tau1`.
    Alt,
    Midpoint,
}

impl TauRule {
    pub fn pick(self, t: &Thresholds) -> f64 {
        match self {
            TauRule::Null => t.tau0,
            TauRule::Alt => t.tau1,
            TauRule::Midpoint => 0.5 * (t.tau0 + t.tau1),
        }
    }
}

impl fmt::Display for TauRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TauRule::Null => "null",
            TauRule::Alt => "alt",
            TauRule::Midpoint => "midpoint",
        })
    }
}

impl FromStr for TauRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "null" | "tau0" => Ok(TauRule::Null),
            "alt" | "tau1" => Ok(TauRule::Alt),
            "mid" | "midpoint" => Ok(TauRule::Midpoint),
            other => Err(invalid(format!("unknown tau rule {other:?}"))),
        }
    }
}

/// Outcome of one test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub config: TestConfig,
    pub stat: StatValue,
    pub tau: f64,
    /// `1` iff `stat.value > tau`.
    pub decision: u8,
}

/// Applies `psi = 1{value > tau}` (strict).
pub fn run_test(stat: StatValue, tau: f64, cfg: &TestConfig) -> Result<TestReport> {
    if stat.value.is_nan() {
        return Err(Error::NonFinite("statistic value is NaN".into()));
    }
    if !tau.is_finite() {
        return Err(Error::NonFinite(format!("threshold must be finite, got {tau}")));
    }
    let decision = u8::from(stat.value > tau);
    Ok(TestReport {
        config: *cfg,
        stat,
        tau,
        decision,
    })
}

/// Result of the test under bounded adversarial perturbations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialReport {
    pub report: TestReport,
    /// Detection is guaranteed for `theta` above this level.
    pub guarantee_theta: f64,
    /// `theta <= 2 k sqrt(log(p)/n)`: no test separates the hypotheses there.
    pub indistinguishable: bool,
}

/// Tests at `1 + k sqrt(log(p/delta)/n)`, the level that absorbs an
/// adversarial perturbation with `|N|_inf <= sqrt(log(p/delta)/n)`.
pub fn adversarial_test(
    sigma_hat: &SymMatrix,
    cfg: &TestConfig,
    opts: &StatOptions,
) -> Result<AdversarialReport> {
    cfg.validate()?;
    if cfg.statistic == StatKind::Diag {
        return Err(invalid("the adversarial test uses lambda_k, sdp or mdp"));
    }
    if sigma_hat.dim() != cfg.p {
        return Err(Error::Dimension(format!(
            "matrix is {0}x{0} but p = {1}",
            sigma_hat.dim(),
            cfg.p
        )));
    }
    let (p, k, n) = (cfg.p as f64, cfg.k as f64, cfg.nf());
    let margin = ((p / cfg.delta).ln() / n).sqrt();
    let tau = 1.0 + k * margin;
    let stat = compute(cfg.statistic, sigma_hat, cfg.k, opts)?;
    Ok(AdversarialReport {
        report: run_test(stat, tau, cfg)?,
        guarantee_theta: 2.0 * k * margin,
        indistinguishable: cfg.theta <= 2.0 * k * (p.ln() / n).sqrt(),
    })
}
