//! The density comparison and the phase-transition experiment.

use serde::{Deserialize, Serialize};

use super::{error_rates, quantile, run_arm, Draw};
use crate::error::{invalid, Result};
use crate::models::{ModelSpec, SpikeMode};
use crate::rng::Seed;
use crate::stats::{StatKind, StatOptions};

/// Null and alternative draws of the diagonal and MDP statistics, both
/// computed on the same matrix in every trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityResult {
    pub draws: Vec<Draw>,
    pub overlap: Vec<Overlap>,
}

/// How much of the alternative distribution falls below the null quantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub statistic: StatKind,
    pub alpha: f64,
    pub null_quantile: f64,
    /// Fraction of alternative draws `<= null_quantile`.
    pub alt_below: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn density_experiment(
    p: usize,
    n: usize,
    k: usize,
    theta: f64,
    trials: usize,
    seed: u64,
    opts: &StatOptions,
    threads: Option<usize>,
) -> Result<DensityResult> {
    if trials < 20 {
        return Err(invalid("the density experiment needs at least 20 trials per arm"));
    }
    let stats = [StatKind::Diag, StatKind::Mdp];
    let null = ModelSpec::Null { p, n };
    let alt = ModelSpec::Spiked {
        p,
        n,
        k,
        theta,
        mode: SpikeMode::FixedSupport,
    };
    let mut draws = run_arm(&null, 0, &stats, k, trials, seed, opts, threads)?;
    draws.extend(run_arm(&alt, 1, &stats, k, trials, seed, opts, threads)?);
    let pick = |h: u8, s: StatKind| -> Vec<f64> {
        draws
            .iter()
            .filter(|d| d.hypothesis == h && d.statistic == s)
            .map(|d| d.value)
            .collect()
    };
    let alpha = 0.05;
    let mut overlap = Vec::new();
    for s in stats {
        let q = quantile(&pick(0, s), alpha)?;
        let (_, type2) = error_rates(&[], &pick(1, s), q);
        overlap.push(Overlap {
            statistic: s,
            alpha,
            null_quantile: q,
            alt_below: type2,
        });
    }
    Ok(DensityResult { draws, overlap })
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn eta_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTransitionConfig {
    pub ps: Vec<usize>,
    pub theta: f64,
    pub trials: usize,
    pub alphas: Vec<f64>,
    /// Targets for `eta_circ = k^2 log(p/k) / n`; each fixes `n`.
    pub eta_circ: Vec<f64>,
    /// Points that would need more samples are skipped.
    pub n_max: usize,
    pub seed: u64,
    #[serde(default)]
    pub options: StatOptions,
}

impl Default for PhaseTransitionConfig {
    fn default() -> Self {
        PhaseTransitionConfig {
            ps: vec![50, 100, 200, 500],
            theta: 1.0,
            trials: 200,
            alphas: vec![0.05, 0.01],
            eta_circ: eta_grid(0.01, 10.0, 16),
            n_max: 100_000,
            seed: 0,
            options: StatOptions::default(),
        }
    }
}

/// One `(p, n)` design evaluated at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub p: usize,
    pub k: usize,
    pub n: usize,
    pub theta: f64,
    pub alpha: f64,
    /// `k log(p/k) / n`.
    pub eta_star: f64,
    /// `k^2 log(p/k) / n`.
    pub eta_circ: f64,
    /// Type II error: fraction of alternative draws `<= tau`.
    pub p_ii: f64,
    /// Empirical null quantile.
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    Star,
    Circ,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub p: usize,
    pub alpha: f64,
    pub scaling: Scaling,
    /// `eta` where the type II error first reaches 1/2 (log-interpolated).
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub p: usize,
    pub eta_circ: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTransitionResult {
    pub points: Vec<GridPoint>,
    pub crossings: Vec<Crossing>,
    pub skipped: Vec<Skipped>,
}

/// Type II error of the MDP test with `k = floor(sqrt(p))` over a grid of
/// sample sizes; every run is reported under both scalings.
pub fn phase_transition(
    cfg: &PhaseTransitionConfig,
    threads: Option<usize>,
) -> Result<PhaseTransitionResult> {
    if cfg.ps.is_empty() || cfg.eta_circ.is_empty() {
        return Err(invalid("the phase-transition grid is empty"));
    }
    if !(cfg.theta > 0.0) {
        return Err(invalid("theta must be positive"));
    }
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for &p in &cfg.ps {
        let k = ((p as f64).sqrt().floor() as usize).max(1);
        let lpk = (p as f64 / k as f64).ln();
        for (idx, &eta) in cfg.eta_circ.iter().enumerate() {
            let n = ((k * k) as f64 * lpk / eta).round().max(1.0) as usize;
            if n > cfg.n_max {
                skipped.push(Skipped { p, eta_circ: eta, n });
                continue;
            }
            let seed = Seed::new(cfg.seed, 0).child(p as u64).child(idx as u64).master;
            let null = ModelSpec::Null { p, n };
            let alt = ModelSpec::Spiked {
                p,
                n,
                k,
                theta: cfg.theta,
                mode: SpikeMode::FixedSupport,
            };
            let value = |d: Vec<Draw>| d.into_iter().map(|d| d.value).collect::<Vec<_>>();
            let stat = [StatKind::Mdp];
            let h0 = value(run_arm(&null, 0, &stat, k, cfg.trials, seed, &cfg.options, threads)?);
            let h1 = value(run_arm(&alt, 1, &stat, k, cfg.trials, seed, &cfg.options, threads)?);
            for &alpha in &cfg.alphas {
                let tau = quantile(&h0, alpha)?;
                let (_, p_ii) = error_rates(&[], &h1, tau);
                points.push(GridPoint {
                    p,
                    k,
                    n,
                    theta: cfg.theta,
                    alpha,
                    eta_star: k as f64 * lpk / n as f64,
                    eta_circ: (k * k) as f64 * lpk / n as f64,
                    p_ii,
                    tau,
                });
            }
        }
    }
    let mut crossings = Vec::new();
    for &p in &cfg.ps {
        for &alpha in &cfg.alphas {
            for scaling in [Scaling::Star, Scaling::Circ] {
                crossings.push(Crossing {
                    p,
                    alpha,
                    scaling,
                    eta: crossing(&points, p, alpha, scaling),
                });
            }
        }
    }
    Ok(PhaseTransitionResult {
        points,
        crossings,
        skipped,
    })
}

/// Smallest `eta` at which the type II error reaches 1/2, interpolating
/// linearly in `log eta` between the two bracketing grid points.
pub fn crossing(points: &[GridPoint], p: usize, alpha: f64, scaling: Scaling) -> Option<f64> {
    let eta = |g: &GridPoint| match scaling {
        Scaling::Star => g.eta_star,
        Scaling::Circ => g.eta_circ,
    };
    let mut curve: Vec<(f64, f64)> = points
        .iter()
        .filter(|g| g.p == p && g.alpha == alpha)
        .map(|g| (eta(g), g.p_ii))
        .collect();
    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    let i = curve.iter().position(|&(_, y)| y >= 0.5)?;
    if i == 0 {
        return Some(curve[0].0);
    }
    let ((x0, y0), (x1, y1)) = (curve[i - 1], curve[i]);
    let t = (0.5 - y0) / (y1 - y0);
    Some((x0.ln() + t * (x1.ln() - x0.ln())).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_sample_size_arithmetic() {
        let g = eta_grid(0.01, 1.0, 12);
        assert_eq!(g.len(), 12);
        assert!((g[0] - 0.01).abs() < 1e-15 && (g[11] - 1.0).abs() < 1e-12);
        let n = (100.0 * 10f64.ln() / 0.01).round() as usize;
        assert_eq!(n, 23_026);
    }

    #[test]
    fn crossing_interpolates_in_log_eta() {
        let mk = |eta: f64, p_ii: f64| GridPoint {
            p: 50,
            k: 7,
            n: 1,
            theta: 1.0,
            alpha: 0.05,
            eta_star: eta / 7.0,
            eta_circ: eta,
            p_ii,
            tau: 0.0,
        };
        let pts = [mk(0.01, 0.0), mk(0.1, 0.25), mk(1.0, 0.75)];
        let c = crossing(&pts, 50, 0.05, Scaling::Circ).unwrap();
        assert!((c - 0.1f64.sqrt()).abs() < 1e-12);
        let s = crossing(&pts, 50, 0.05, Scaling::Star).unwrap();
        assert!((s - c / 7.0).abs() < 1e-12);
        assert_eq!(crossing(&pts[..2], 50, 0.05, Scaling::Circ), None);
    }

    #[test]
    fn tiny_phase_transition_runs() {
        let cfg = PhaseTransitionConfig {
            ps: vec![16],
            trials: 20,
            alphas: vec![0.05],
            eta_circ: vec![0.05, 1.0, 1e-6],
            n_max: 10_000,
            seed: 3,
            ..Default::default()
        };
        let r = phase_transition(&cfg, Some(1)).unwrap();
        assert_eq!(r.points.len(), 2);
        assert_eq!(r.skipped.len(), 1);
        assert!(r.points[0].p_ii <= r.points[1].p_ii);
    }
}
