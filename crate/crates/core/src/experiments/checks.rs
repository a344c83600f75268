//! Numerical checks: likelihood-ratio cross moments, the Marcenko-Pastur
//! edge, and detection of a planted clique through the Gaussianization.

use serde::{Deserialize, Serialize};

use super::inference::{ks_critical_value, ks_two_sample, welch_one_sided, WelchTest};
use super::{error_rates, quantile, run_arm, run_trials, trial_seed};
use crate::error::{invalid, Result};
use crate::matrix::{empirical_covariance, largest_eigenvalue, DEFAULT_EIGEN_TOL};
use crate::models::{sample_null, ModelSpec};
use crate::stats::{StatKind, StatOptions};

/// Samples per work item in [`lr_affinity_check`]; fixed so the chunking,
/// and therefore the result, does not depend on the thread count.
const LR_CHUNK: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrCheck {
    pub mc_estimate: f64,
    pub closed_form: f64,
    pub std_error: f64,
}

/// `(1 - theta^2 (r/k)^2)^(-1/2)`.
pub fn lr_closed_form(k: usize, theta: f64, r: usize) -> f64 {
    let c = r as f64 / k as f64;
    (1.0 - theta * theta * c * c).powf(-0.5)
}

/// Monte Carlo estimate of `E_0[L_S L_T]` for supports with `|S ∩ T| = r`,
/// where `L_S(X) = (1+theta)^(-1/2) exp(theta/(2(1+theta)) (X^T u(S))^2)` is
/// the likelihood ratio of the spike `u(S)` (entries `1/sqrt(k)` on `S`).
pub fn lr_affinity_check(
    p: usize,
    k: usize,
    theta: f64,
    r: usize,
    m: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<LrCheck> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(invalid(format!("theta must lie in (0, 1/2), got {theta}")));
    }
    if k < 1 || r > k || 2 * k - r > p {
        return Err(invalid(format!("need 0 <= r <= k and 2k - r <= p (p={p}, k={k}, r={r})")));
    }
    if m < 2 {
        return Err(invalid("need at least two Monte Carlo samples"));
    }
    // S = {0..k}, T = {k-r..2k-r}
    let s_hi = k;
    let (t_lo, t_hi) = (k - r, 2 * k - r);
    let scale = 1.0 / (k as f64).sqrt();
    let a = 0.5 * theta / (1.0 + theta);
    let norm = 1.0 / (1.0 + theta);
    let chunks = m.div_ceil(LR_CHUNK);
    let sums = run_trials(chunks, threads, |c| {
        let len = LR_CHUNK.min(m - c as usize * LR_CHUNK);
        let mut rng = trial_seed(seed, 0, c).rng();
        let mut x = vec![0.0; p];
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..len {
            rng.fill_gaussian(&mut x);
            let ys: f64 = x[..s_hi].iter().sum::<f64>() * scale;
            let yt: f64 = x[t_lo..t_hi].iter().sum::<f64>() * scale;
            let v = norm * (a * (ys * ys + yt * yt)).exp();
            s1 += v;
            s2 += v * v;
        }
        Ok((s1, s2))
    })?;
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |acc, s| (acc.0 + s.0, acc.1 + s.1));
    let mf = m as f64;
    let mean = s1 / mf;
    let var = ((s2 / mf - mean * mean) * mf / (mf - 1.0)).max(0.0);
    Ok(LrCheck {
        mc_estimate: mean,
        closed_form: lr_closed_form(k, theta, r),
        std_error: (var / mf).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpEdgeCheck {
    pub mean_lambda_max: f64,
    /// `(1 + sqrt(p/n))^2`.
    pub predicted_edge: f64,
    pub draws: Vec<f64>,
}

/// Average top eigenvalue of null empirical covariances.
pub fn mp_edge_check(
    p: usize,
    n: usize,
    trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<MpEdgeCheck> {
    if trials < 1 {
        return Err(invalid("need at least one trial"));
    }
    let draws = run_trials(trials, threads, |t| {
        let s = empirical_covariance(&sample_null(p, n, trial_seed(seed, 0, t))?)?;
        Ok(largest_eigenvalue(&s, DEFAULT_EIGEN_TOL)?.value)
    })?;
    Ok(MpEdgeCheck {
        mean_lambda_max: draws.iter().sum::<f64>() / trials as f64,
        predicted_edge: (1.0 + (p as f64 / n as f64).sqrt()).powi(2),
        draws,
    })
}

/// `1 + k^2/(4 pi n) - 3 sqrt(k log(2/delta)/n)`, the high-probability floor
/// of the statistics on reduced planted-clique data.
pub fn planted_floor(n: usize, k: usize, delta: f64) -> f64 {
    let (n, k) = (n as f64, k as f64);
    1.0 + k * k / (4.0 * std::f64::consts::PI * n) - 3.0 * (k * (2.0 / delta).ln() / n).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueConfig {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub delta: f64,
    pub seed: u64,
    /// Also run SDP when `n` is at most this.
    pub sdp_max_dim: usize,
    /// Also draw MDP on genuine Gaussian data of the same shape and compare.
    pub gaussian_reference: bool,
    #[serde(default)]
    pub options: StatOptions,
}

impl CliqueConfig {
    pub fn new(n: usize, k: usize, trials: usize, delta: f64, seed: u64) -> Self {
        CliqueConfig {
            n,
            k,
            trials,
            delta,
            seed,
            sdp_max_dim: 20,
            gaussian_reference: false,
            options: StatOptions::default(),
        }
    }
}

/// Distance between the reduced-null and Gaussian-null MDP distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsComparison {
    pub statistic: f64,
    pub critical_value_1pct: f64,
    pub indistinguishable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueReport {
    pub config: CliqueConfig,
    /// Sparsity used by the statistics (`max(k, 1)`).
    pub sparsity: usize,
    pub null_draws: Vec<f64>,
    pub planted_draws: Vec<f64>,
    /// Empirical `(1 - delta)` null quantile.
    pub tau: f64,
    pub power: f64,
    pub null_mean: f64,
    pub planted_mean: f64,
    pub welch: WelchTest,
    pub planted_floor: f64,
    /// The floor is only claimed for even `k >= 14`.
    pub floor_applies: bool,
    /// Fraction of planted draws above the floor.
    pub planted_above_floor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sdp_null_draws: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sdp_planted_draws: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaussian_draws: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaussian_ks: Option<KsComparison>,
    pub warnings: Vec<String>,
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Planted versus null graphs through the Gaussianization, tested with MDP
/// (and SDP for small `n`) calibrated at the empirical null quantile.
pub fn clique_detection_experiment(cfg: &CliqueConfig, threads: Option<usize>) -> Result<CliqueReport> {
    if cfg.trials < 2 {
        return Err(invalid("need at least two trials per arm"));
    }
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(invalid("delta must lie in (0, 1)"));
    }
    let n = cfg.n;
    let sparsity = cfg.k.max(1);
    let mut warnings = Vec::new();
    let floor_applies = cfg.k >= 14 && cfg.k % 2 == 0;
    if !floor_applies {
        warnings.push(format!(
            "k = {} is not an even number >= 14; the planted-arm floor is reported but not guaranteed",
            cfg.k
        ));
    }
    let mut stats = vec![StatKind::Mdp];
    if n <= cfg.sdp_max_dim {
        stats.push(StatKind::Sdp);
    }
    let null = ModelSpec::Clique { n, k: 0 };
    let planted = ModelSpec::Clique { n, k: cfg.k };
    let d0 = run_arm(&null, 0, &stats, sparsity, cfg.trials, cfg.seed, &cfg.options, threads)?;
    let d1 = run_arm(&planted, 1, &stats, sparsity, cfg.trials, cfg.seed, &cfg.options, threads)?;
    let pick = |d: &[super::Draw], s: StatKind| -> Vec<f64> {
        d.iter().filter(|x| x.statistic == s).map(|x| x.value).collect()
    };
    let (null_draws, planted_draws) = (pick(&d0, StatKind::Mdp), pick(&d1, StatKind::Mdp));
    let tau = quantile(&null_draws, cfg.delta)?;
    let (_, type2) = error_rates(&[], &planted_draws, tau);
    let floor = planted_floor(n, cfg.k, cfg.delta);
    let above = planted_draws.iter().filter(|&&x| x > floor).count() as f64 / cfg.trials as f64;

    let (gaussian_draws, gaussian_ks) = if cfg.gaussian_reference {
        let g = ModelSpec::Null { p: n, n };
        let dg = run_arm(&g, 2, &[StatKind::Mdp], sparsity, cfg.trials, cfg.seed, &cfg.options, threads)?;
        let dg = pick(&dg, StatKind::Mdp);
        let d = ks_two_sample(&null_draws, &dg)?;
        let c = ks_critical_value(null_draws.len(), dg.len(), 0.01);
        (
            Some(dg),
            Some(KsComparison {
                statistic: d,
                critical_value_1pct: c,
                indistinguishable: d <= c,
            }),
        )
    } else {
        (None, None)
    };
    let has_sdp = stats.contains(&StatKind::Sdp);
    Ok(CliqueReport {
        config: cfg.clone(),
        sparsity,
        tau,
        power: 1.0 - type2,
        null_mean: mean(&null_draws),
        planted_mean: mean(&planted_draws),
        welch: welch_one_sided(&planted_draws, &null_draws)?,
        planted_floor: floor,
        floor_applies,
        planted_above_floor: above,
        sdp_null_draws: has_sdp.then(|| pick(&d0, StatKind::Sdp)),
        sdp_planted_draws: has_sdp.then(|| pick(&d1, StatKind::Sdp)),
        null_draws,
        planted_draws,
        gaussian_draws,
        gaussian_ks,
        warnings,
    })
}
