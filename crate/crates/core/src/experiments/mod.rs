//! Monte Carlo harness.
//!
//! Every trial draws from its own seed stream, so results do not depend on the
//! number of worker threads: trials run on a rayon pool and are collected in
//! trial order.

mod checks;
mod figures;
mod inference;
mod output;

pub use checks::{
    clique_detection_experiment, planted_floor, lr_affinity_check, lr_closed_form, mp_edge_check,
    CliqueConfig, CliqueReport, KsComparison, LrCheck, MpEdgeCheck,
};
pub use figures::{
    crossing, density_experiment, eta_grid, phase_transition, Crossing, DensityResult, GridPoint,
    Overlap, PhaseTransitionConfig, PhaseTransitionResult, Scaling, Skipped,
};
pub use inference::{
    histogram, ks_critical_value, ks_one_sample_normal, ks_two_sample, welch_one_sided, Histogram,
    WelchTest,
};
pub use output::{draws_csv, grid_csv, histogram_csv, phase_svg, JsonSummary, SCHEMA_VERSION};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::models::ModelSpec;
use crate::rng::Seed;
use crate::stats::{compute, StatKind, StatOptions};

/// `(1 - alpha) N` rounded up, with float noise such as `0.95 * 100` absorbed.
fn upper_rank(n: usize, alpha: f64) -> usize {
    let x = (1.0 - alpha) * n as f64;
    let r = x.round();
    let rank = if (x - r).abs() < 1e-9 { r } else { x.ceil() };
    (rank as usize).clamp(1, n)
}

/// Conservative empirical upper quantile: the `ceil((1 - alpha) N)`-th order
/// statistic. Requires `N alpha >= 1`.
pub fn quantile(draws: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let n = draws.len();
    if (n as f64) * alpha < 1.0 - 1e-9 {
        return Err(invalid(format!(
            "{n} draws cannot resolve the {alpha} quantile; need at least {}",
            (1.0 / alpha).ceil()
        )));
    }
    if draws.iter().any(|x| x.is_nan()) {
        return Err(Error::NonFinite("NaN statistic draw".into()));
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[upper_rank(n, alpha) - 1])
}

/// Upper quantiles for several levels.
pub fn null_quantiles(draws: &[f64], alphas: &[f64]) -> Result<Vec<f64>> {
    alphas.iter().map(|&a| quantile(draws, a)).collect()
}

/// `(type1, type2)`: the frequency of `stat > tau` under the null and of
/// `stat <= tau` under the alternative.
pub fn error_rates(null: &[f64], alt: &[f64], tau: f64) -> (f64, f64) {
    let frac = |xs: &[f64], f: &dyn Fn(f64) -> bool| {
        if xs.is_empty() {
            f64::NAN
        } else {
            xs.iter().filter(|&&x| f(x)).count() as f64 / xs.len() as f64
        }
    };
    (frac(null, &|x| x > tau), frac(alt, &|x| x <= tau))
}

/// Runs `f(trial)` for `0..trials` on `threads` workers (`None` uses every
/// core) and returns results in trial order.
pub fn run_trials<T, F>(trials: usize, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(invalid("--threads must be at least 1"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..trials as u64).into_par_iter().map(&f).collect())
}

/// One statistic value from one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub trial: u64,
    /// `0` for the null arm, `1` for the alternative.
    pub hypothesis: u8,
    pub statistic: StatKind,
    pub value: f64,
}

/// A two-arm experiment: statistics of `null` and `alt` draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub null: ModelSpec,
    pub alt: ModelSpec,
    pub statistics: Vec<StatKind>,
    pub k: usize,
    pub trials: usize,
    pub alphas: Vec<f64>,
    pub seed: u64,
    #[serde(default)]
    pub options: StatOptions,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 2 {
            return Err(invalid("an experiment needs at least 2 trials"));
        }
        if self.statistics.is_empty() {
            return Err(invalid("no statistics requested"));
        }
        if self.alphas.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return Err(invalid("alpha levels must lie in (0, 1)"));
        }
        if self.null.p() != self.alt.p() {
            return Err(Error::Dimension("null and alternative dimensions differ".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub statistic: StatKind,
    pub alpha: f64,
    /// Null quantile used as the test level.
    pub tau: f64,
    pub type1: f64,
    pub type2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub draws: Vec<Draw>,
    pub levels: Vec<QuantileRow>,
}

impl ExperimentResult {
    pub fn values(&self, hypothesis: u8, statistic: StatKind) -> Vec<f64> {
        self.draws
            .iter()
            .filter(|d| d.hypothesis == hypothesis && d.statistic == statistic)
            .map(|d| d.value)
            .collect()
    }
}

/// Seed of trial `trial` in arm `arm`.
pub(crate) fn trial_seed(master: u64, arm: u64, trial: u64) -> Seed {
    Seed::new(master, 0).child(arm).with_stream(trial)
}

/// Draws every statistic on the same matrix per trial (paired design).
pub(crate) fn run_arm(
    model: &ModelSpec,
    arm: u8,
    statistics: &[StatKind],
    k: usize,
    trials: usize,
    seed: u64,
    opts: &StatOptions,
    threads: Option<usize>,
) -> Result<Vec<Draw>> {
    let per_trial = run_trials(trials, threads, |t| {
        let a = model.covariance(trial_seed(seed, arm as u64, t))?;
        statistics
            .iter()
            .map(|&s| {
                Ok(Draw {
                    trial: t,
                    hypothesis: arm,
                    statistic: s,
                    value: compute(s, &a, k, opts)?.value,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(per_trial.into_iter().flatten().collect())
}

/// Runs both arms, then calibrates each statistic at every level.
pub fn run_plan(plan: &ExperimentPlan, threads: Option<usize>) -> Result<ExperimentResult> {
    plan.validate()?;
    let mut draws = Vec::with_capacity(2 * plan.trials * plan.statistics.len());
    for (arm, model) in [(0u8, &plan.null), (1u8, &plan.alt)] {
        draws.extend(run_arm(
            model,
            arm,
            &plan.statistics,
            plan.k,
            plan.trials,
            plan.seed,
            &plan.options,
            threads,
        )?);
    }
    let mut result = ExperimentResult {
        draws,
        levels: Vec::new(),
    };
    for &s in &plan.statistics {
        let (null, alt) = (result.values(0, s), result.values(1, s));
        for &alpha in &plan.alphas {
            let tau = quantile(&null, alpha)?;
            let (type1, type2) = error_rates(&null, &alt, tau);
            result.levels.push(QuantileRow {
                statistic: s,
                alpha,
                tau,
                type1,
                type2,
            });
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_conventions() {
        let draws: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(quantile(&draws, 0.05).unwrap(), 95.0);
        assert_eq!(quantile(&draws, 0.01).unwrap(), 99.0);
        assert_eq!(quantile(&[2.5; 40], 0.05).unwrap(), 2.5);
        assert!(quantile(&draws[..99], 0.01).is_err());
        assert!(quantile(&draws, 0.0).is_err());
    }

    #[test]
    fn infinite_levels() {
        let (a, b) = ([1.0, 2.0, 3.0], [2.0, 4.0]);
        assert_eq!(error_rates(&a, &b, f64::INFINITY), (0.0, 1.0));
        assert_eq!(error_rates(&a, &b, f64::NEG_INFINITY), (1.0, 0.0));
        assert_eq!(error_rates(&a, &b, 2.0), (1.0 / 3.0, 0.5));
    }

    #[test]
    fn trials_are_ordered_and_thread_independent() {
        let f = |t: u64| Ok(trial_seed(3, 1, t).rng().gaussian());
        let one = run_trials(50, Some(1), f).unwrap();
        let four = run_trials(50, Some(4), f).unwrap();
        assert_eq!(one, four);
        assert!(run_trials(1, Some(0), f).is_err());
    }

    #[test]
    fn small_plan_runs() {
        let plan = ExperimentPlan {
            null: ModelSpec::Null { p: 10, n: 40 },
            alt: ModelSpec::Spiked {
                p: 10,
                n: 40,
                k: 2,
                theta: 3.0,
                mode: Default::default(),
            },
            statistics: vec![StatKind::Diag, StatKind::Mdp],
            k: 2,
            trials: 20,
            alphas: vec![0.05],
            seed: 1,
            options: StatOptions::default(),
        };
        let r = run_plan(&plan, Some(2)).unwrap();
        assert_eq!(r.draws.len(), 80);
        assert_eq!(r.levels.len(), 2);
        assert_eq!(r, run_plan(&plan, Some(1)).unwrap());
        // paired: per trial, D <= MDP
        for t in 0..20 {
            for h in 0..2 {
                let get = |s| r.draws.iter().find(|d| d.trial == t && d.hypothesis == h && d.statistic == s).unwrap().value;
                assert!(get(StatKind::Diag) <= get(StatKind::Mdp) + 1e-9);
            }
        }
    }
}
