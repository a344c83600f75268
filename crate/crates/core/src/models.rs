//! Seeded samplers for the null, spiked, sub-Gaussian, ℓq-sparse,
//! adversarial and planted-clique models.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::matrix::{empirical_covariance, DataMatrix, SymMatrix};
use crate::rng::{GaussianRng, Seed};
use crate::stats::lq_norm;

/// How the support and direction of a sparse spike are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpikeMode {
    /// Support `{0, .., k-1}`, direction uniform on the sphere.
    #[default]
    FixedSupport,
    /// Uniform random support, direction uniform on the sphere.
    RandomSupport,
    /// Uniform random support, every entry `1/sqrt(k)`.
    UniformKgrid,
}

impl FromStr for SpikeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "fixed" | "fixed_support" => Ok(SpikeMode::FixedSupport),
            "random" | "random_support" => Ok(SpikeMode::RandomSupport),
            "kgrid" | "uniform_kgrid" => Ok(SpikeMode::UniformKgrid),
            other => Err(invalid(format!("unknown spike mode {other:?}"))),
        }
    }
}

impl fmt::Display for SpikeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpikeMode::FixedSupport => "fixed_support",
            SpikeMode::RandomSupport => "random_support",
            SpikeMode::UniformKgrid => "uniform_kgrid",
        })
    }
}

/// A k-sparse unit spike `v` with strength `theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeSpec {
    pub p: usize,
    /// Sorted, 0-based.
    pub support: Vec<usize>,
    /// `v` restricted to `support`.
    pub direction: Vec<f64>,
    pub theta: f64,
}

impl SpikeSpec {
    pub fn new(p: usize, support: Vec<usize>, direction: Vec<f64>, theta: f64) -> Result<Self> {
        if support.is_empty() || support.len() != direction.len() {
            return Err(invalid("support and direction must be nonempty and of equal length"));
        }
        if !support.windows(2).all(|w| w[0] < w[1]) || support[support.len() - 1] >= p {
            return Err(invalid("support must be sorted, distinct and inside 0..p"));
        }
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("direction must be a unit vector, norm {norm}")));
        }
        if !theta.is_finite() {
            return Err(Error::NonFinite("theta".into()));
        }
        Ok(SpikeSpec {
            p,
            support,
            direction,
            theta,
        })
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }

    /// Full-length `v`.
    pub fn vector(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.p];
        for (&i, &x) in self.support.iter().zip(&self.direction) {
            v[i] = x;
        }
        v
    }

    /// `I_p + theta v v^T`.
    pub fn covariance(&self) -> SymMatrix {
        SymMatrix::spiked_identity(&self.vector(), self.theta)
    }
}

fn unit_gaussian(rng: &mut GaussianRng, k: usize) -> Vec<f64> {
    loop {
        let mut d = vec![0.0; k];
        rng.fill_gaussian(&mut d);
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            d.iter_mut().for_each(|x| *x /= norm);
            return d;
        }
    }
}

pub fn random_sparse_spike(
    p: usize,
    k: usize,
    theta: f64,
    mode: SpikeMode,
    seed: Seed,
) -> Result<SpikeSpec> {
    if k < 1 || k > p {
        return Err(invalid(format!("need 1 <= k <= p, got k = {k}, p = {p}")));
    }
    let mut rng = seed.rng();
    let support = match mode {
        SpikeMode::FixedSupport => (0..k).collect(),
        SpikeMode::RandomSupport | SpikeMode::UniformKgrid => rng.subset(p, k),
    };
    let mut direction = match mode {
        SpikeMode::UniformKgrid => vec![1.0 / (k as f64).sqrt(); k],
        _ => unit_gaussian(&mut rng, k),
    };
    // re-normalize so the unit check holds to the last ulp
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    direction.iter_mut().for_each(|x| *x /= norm);
    SpikeSpec::new(p, support, direction, theta)
}

/// `n` rows of i.i.d. `N(0, I_p)`.
pub fn sample_null(p: usize, n: usize, seed: Seed) -> Result<DataMatrix> {
    if p < 1 || n < 1 {
        return Err(Error::EmptySample);
    }
    let mut data = vec![0.0; n * p];
    seed.rng().fill_gaussian(&mut data);
    DataMatrix::new(n, p, data)
}

/// Maps every row `z` to `z + (sqrt(1 + theta) - 1)(v^T z) v`, the rank-one
/// square root of `I + theta v v^T`. `theta = 0` leaves the data untouched.
pub fn apply_spike(data: &mut [f64], p: usize, spike: &SpikeSpec) {
    let c = (1.0 + spike.theta).sqrt() - 1.0;
    if c == 0.0 {
        return;
    }
    for row in data.chunks_exact_mut(p) {
        let proj: f64 = spike.support.iter().zip(&spike.direction).map(|(&i, &v)| row[i] * v).sum();
        for (&i, &v) in spike.support.iter().zip(&spike.direction) {
            row[i] += c * proj * v;
        }
    }
}

/// `n` rows of `N(0, I_p + theta v v^T)`; the underlying `Z` is the
/// [`sample_null`] draw of the same seed.
pub fn sample_spiked(spike: &SpikeSpec, n: usize, seed: Seed) -> Result<DataMatrix> {
    if !(spike.theta > 0.0) {
        return Err(invalid(format!(
            "spiked sampling needs theta > 0 (got {}); use sample_null",
            spike.theta
        )));
    }
    let p = spike.p;
    let x = sample_null(p, n, seed)?;
    let mut data = x.as_slice().to_vec();
    apply_spike(&mut data, p, spike);
    DataMatrix::new(n, p, data)
}

/// Variance-one sub-Gaussian coefficient laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubGaussianFamily {
    /// `+1` or `-1` with equal probability.
    Rademacher,
    /// Uniform on `[-sqrt(3), sqrt(3)]`.
    Uniform,
}

impl FromStr for SubGaussianFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rademacher" => Ok(SubGaussianFamily::Rademacher),
            "uniform" => Ok(SubGaussianFamily::Uniform),
            other => Err(invalid(format!("unknown sub-Gaussian family {other:?}"))),
        }
    }
}

/// Rows `Sigma^{1/2} Z` with i.i.d. coefficients from `family`; `Sigma` is the
/// identity or the spike's covariance.
pub fn sample_subgaussian(
    spike: Option<&SpikeSpec>,
    p: usize,
    n: usize,
    family: SubGaussianFamily,
    seed: Seed,
) -> Result<DataMatrix> {
    if p < 1 || n < 1 {
        return Err(Error::EmptySample);
    }
    if let Some(s) = spike {
        if s.p != p {
            return Err(Error::Dimension(format!("spike has p = {}, data p = {p}", s.p)));
        }
        if s.theta < 0.0 {
            return Err(invalid("theta must be >= 0"));
        }
    }
    let mut rng = seed.rng();
    let r3 = 3f64.sqrt();
    let mut data: Vec<f64> = (0..n * p)
        .map(|_| match family {
            SubGaussianFamily::Rademacher => rng.rademacher(),
            SubGaussianFamily::Uniform => (2.0 * rng.uniform() - 1.0) * r3,
        })
        .collect();
    if let Some(s) = spike {
        apply_spike(&mut data, p, s);
    }
    DataMatrix::new(n, p, data)
}

/// Unit vector with `|v|_q <= k^(1/q - 1/2)` that is generally not sparse:
/// a k-sparse spike plus a geometrically decaying tail, the tail halved until
/// the ℓq budget holds.
pub fn lq_spike(p: usize, k: usize, q: f64, seed: Seed) -> Result<Vec<f64>> {
    if !(q > 0.0 && q < 2.0) {
        return Err(invalid(format!("q must lie in (0, 2), got {q}")));
    }
    let base = random_sparse_spike(p, k, 1.0, SpikeMode::RandomSupport, seed)?;
    let v0 = base.vector();
    let budget = (k as f64).powf(1.0 / q - 0.5);
    let mut rng = seed.child(1).rng();
    let floor = base.direction.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    let mut tail = vec![0.0; p];
    let mut scale = 0.5 * floor;
    for i in (0..p).filter(|i| base.support.binary_search(i).is_err()) {
        tail[i] = rng.rademacher() * scale;
        scale *= 0.7;
    }
    for _ in 0..64 {
        let mut v: Vec<f64> = v0.iter().zip(&tail).map(|(a, b)| a + b).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        if lq_norm(&v, q) <= budget {
            return Ok(v);
        }
        tail.iter_mut().for_each(|x| *x *= 0.5);
    }
    Ok(v0)
}

/// The two-point adversarial instance in which both hypotheses produce the
/// same observed matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialInstance {
    /// `I_p + (theta/2) v v^T` under either hypothesis.
    pub matrix: SymMatrix,
    pub spike: SpikeSpec,
    /// `0` if the null was drawn (`N = +(theta/2) v v^T`), `1` otherwise
    /// (`N = -(theta/2) v v^T`).
    pub hypothesis: u8,
    /// `theta <= 2 k sqrt(log(p)/n)`, the regime where the construction
    /// respects the perturbation budget.
    pub in_regime: bool,
}

pub fn adversarial_covariance(
    p: usize,
    n: usize,
    k: usize,
    theta: f64,
    seed: Seed,
) -> Result<AdversarialInstance> {
    if !(theta > 0.0) || n < 1 {
        return Err(invalid("need theta > 0 and n >= 1"));
    }
    let spike = random_sparse_spike(p, k, theta, SpikeMode::UniformKgrid, seed)?;
    let hypothesis = u8::from(seed.child(1).rng().bernoulli_half());
    let v = spike.vector();
    let sigma = if hypothesis == 1 {
        SymMatrix::spiked_identity(&v, theta)
    } else {
        SymMatrix::identity(p)
    };
    let sign = if hypothesis == 1 { -1.0 } else { 1.0 };
    let noise = SymMatrix::from_fn(p, |i, j| sign * 0.5 * theta * v[i] * v[j]);
    // I + (theta/2) v v^T in both branches
    let matrix = sigma.add(&noise)?.with_psd_flag(true);
    let in_regime = theta <= 2.0 * k as f64 * ((p as f64).ln() / n as f64).sqrt();
    Ok(AdversarialInstance {
        matrix,
        spike,
        hypothesis,
        in_regime,
    })
}

/// `Sigma + N` with the sup-norm budget on `N` enforced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perturbed {
    pub matrix: SymMatrix,
    /// Budget that was enforced.
    pub budget: f64,
    /// `true` for `sqrt(log(p/delta)/n)`, `false` for the delta-free
    /// `sqrt(log(p)/n)`.
    pub delta_budget: bool,
}

pub fn perturb(sigma: &SymMatrix, noise: &SymMatrix, n: usize, delta: Option<f64>) -> Result<Perturbed> {
    let p = sigma.dim() as f64;
    let (budget, delta_budget) = match delta {
        Some(d) if d > 0.0 && d < 1.0 => (((p / d).ln() / n as f64).sqrt(), true),
        Some(d) => return Err(invalid(format!("delta must lie in (0, 1), got {d}"))),
        None => ((p.ln() / n as f64).sqrt(), false),
    };
    let size = noise.max_abs();
    if size > budget {
        return Err(invalid(format!(
            "perturbation |N|_inf = {size} exceeds the budget {budget}"
        )));
    }
    Ok(Perturbed {
        matrix: sigma.add(noise)?,
        budget,
        delta_budget,
    })
}

/// Graph on `n` vertices as a 0/1 adjacency matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSample {
    pub n: usize,
    pub adjacency: SymMatrix,
    /// Sorted, 0-based clique vertices.
    pub planted: Option<Vec<usize>>,
}

impl GraphSample {
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency.get(u, v) != 0.0
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n)
            .map(|i| self.adjacency.upper_row(i)[1..].iter().filter(|&&x| x != 0.0).count())
            .sum()
    }

    /// One `u v` line per edge, 1-indexed, `u < v`.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for i in 0..self.n {
            for (d, &x) in self.adjacency.upper_row(i).iter().enumerate().skip(1) {
                if x != 0.0 {
                    writeln!(w, "{} {}", i + 1, i + d + 1)?;
                }
            }
        }
        Ok(())
    }
}

/// `G(n, 1/2, k)`: a clique on `k` random vertices, every other pair joined
/// with probability 1/2. `k = 0` is plain `G(n, 1/2)`.
pub fn planted_clique_graph(n: usize, k: usize, seed: Seed) -> Result<GraphSample> {
    if n < 1 || k > n {
        return Err(invalid(format!("need n >= 1 and 0 <= k <= n, got n = {n}, k = {k}")));
    }
    let mut rng = seed.rng();
    let planted = if k > 0 { Some(rng.subset(n, k)) } else { None };
    let mut member = vec![false; n];
    if let Some(s) = &planted {
        s.iter().for_each(|&i| member[i] = true);
    }
    let mut adjacency = SymMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let edge = rng.bernoulli_half();
            if (member[i] && member[j]) || edge {
                adjacency.set(i, j, 1.0);
            }
        }
    }
    Ok(GraphSample {
        n,
        adjacency,
        planted,
    })
}

/// Gaussianization of a graph: `X_ij = |Z_j^(i)| U_ij` with `U_ij = 2A_ij - 1`
/// for `i < j` and an independent Rademacher sign for `i >= j`.
///
/// Without a planted clique the rows are i.i.d. `N(0, I_n)`.
pub fn clique_reduction(g: &GraphSample, seed: Seed) -> Result<DataMatrix> {
    let n = g.n;
    let mut gauss = seed.child(1).rng();
    let mut signs = seed.child(2).rng();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let u = if i < j {
                2.0 * g.adjacency.get(i, j) - 1.0
            } else {
                signs.rademacher()
            };
            data[i * n + j] = gauss.gaussian().abs() * u;
        }
    }
    DataMatrix::new(n, n, data)
}

/// A data-generating process, as accepted by the CLI and experiment plans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    Null {
        p: usize,
        n: usize,
    },
    Spiked {
        p: usize,
        n: usize,
        k: usize,
        theta: f64,
        #[serde(default)]
        mode: SpikeMode,
    },
    SubGaussian {
        p: usize,
        n: usize,
        k: usize,
        /// `0` samples the null.
        theta: f64,
        family: SubGaussianFamily,
    },
    Lq {
        p: usize,
        n: usize,
        k: usize,
        q: f64,
        theta: f64,
    },
    /// Gaussianized `G(n, 1/2, k)`; `p = n`.
    Clique {
        n: usize,
        k: usize,
    },
    /// Two-point adversarial matrix; yields a covariance, not data.
    Adversarial {
        p: usize,
        n: usize,
        k: usize,
        theta: f64,
    },
}

/// Seed tags for the parts of one trial.
const TAG_SPIKE: u64 = 1;
const TAG_DATA: u64 = 2;

impl ModelSpec {
    pub fn p(&self) -> usize {
        match *self {
            ModelSpec::Null { p, .. }
            | ModelSpec::Spiked { p, .. }
            | ModelSpec::SubGaussian { p, .. }
            | ModelSpec::Lq { p, .. }
            | ModelSpec::Adversarial { p, .. } => p,
            ModelSpec::Clique { n, .. } => n,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            ModelSpec::Null { n, .. }
            | ModelSpec::Spiked { n, .. }
            | ModelSpec::SubGaussian { n, .. }
            | ModelSpec::Lq { n, .. }
            | ModelSpec::Clique { n, .. }
            | ModelSpec::Adversarial { n, .. } => n,
        }
    }

    /// Draws a data matrix. Fails for the adversarial model, which only
    /// defines a covariance.
    pub fn sample(&self, seed: Seed) -> Result<DataMatrix> {
        let spike_seed = seed.child(TAG_SPIKE);
        let data_seed = seed.child(TAG_DATA);
        match *self {
            ModelSpec::Null { p, n } => sample_null(p, n, data_seed),
            ModelSpec::Spiked { p, n, k, theta, mode } => {
                let spike = random_sparse_spike(p, k, theta, mode, spike_seed)?;
                sample_spiked(&spike, n, data_seed)
            }
            ModelSpec::SubGaussian { p, n, k, theta, family } => {
                let spike = if theta > 0.0 {
                    Some(random_sparse_spike(p, k, theta, SpikeMode::FixedSupport, spike_seed)?)
                } else {
                    None
                };
                sample_subgaussian(spike.as_ref(), p, n, family, data_seed)
            }
            ModelSpec::Lq { p, n, k, q, theta } => {
                let v = lq_spike(p, k, q, spike_seed)?;
                let spike = SpikeSpec::new(p, (0..p).collect(), v, theta)?;
                sample_spiked(&spike, n, data_seed)
            }
            ModelSpec::Clique { n, k } => {
                let g = planted_clique_graph(n, k, spike_seed)?;
                clique_reduction(&g, data_seed)
            }
            ModelSpec::Adversarial { .. } => Err(invalid(
                "the adversarial model defines a covariance matrix, not data",
            )),
        }
    }

    /// The matrix a statistic is evaluated on.
    pub fn covariance(&self, seed: Seed) -> Result<SymMatrix> {
        match *self {
            ModelSpec::Adversarial { p, n, k, theta } => {
                Ok(adversarial_covariance(p, n, k, theta, seed.child(TAG_SPIKE))?.matrix)
            }
            _ => empirical_covariance(&self.sample(seed)?),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    /// Accepts JSON (`{"model":"null","p":5,"n":10}`) or the compact form
    /// `kind:key=value,...`, e.g. `spiked:p=50,n=100,k=5,theta=2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let value = if s.starts_with('{') {
            serde_json::from_str(s).map_err(|e| invalid(format!("bad model JSON: {e}")))?
        } else {
            let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
            let mut map = serde_json::Map::new();
            map.insert("model".into(), kind.trim().replace('-', "_").into());
            for kv in rest.split(',').filter(|t| !t.trim().is_empty()) {
                let (key, val) = kv
                    .split_once('=')
                    .ok_or_else(|| invalid(format!("expected key=value, got {kv:?}")))?;
                let val = val.trim();
                let json = if let Ok(u) = val.parse::<u64>() {
                    u.into()
                } else if let Ok(x) = val.parse::<f64>() {
                    x.into()
                } else {
                    val.replace('-', "_").into()
                };
                map.insert(key.trim().into(), json);
            }
            serde_json::Value::Object(map)
        };
        serde_json::from_value(value).map_err(|e| invalid(format!("bad model {s:?}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        (m, xs.iter().map(|x| x * x).sum::<f64>() / n)
    }

    #[test]
    fn compact_model_syntax() {
        let m: ModelSpec = "spiked:p=50,n=100,k=5,theta=2,mode=random-support".parse().unwrap();
        assert_eq!(
            m,
            ModelSpec::Spiked {
                p: 50,
                n: 100,
                k: 5,
                theta: 2.0,
                mode: SpikeMode::RandomSupport
            }
        );
        assert_eq!("null:p=3,n=4".parse::<ModelSpec>().unwrap(), ModelSpec::Null { p: 3, n: 4 });
        assert!("null:p=3".parse::<ModelSpec>().is_err());
        assert!("bogus:p=3,n=1".parse::<ModelSpec>().is_err());
        assert!("null:p".parse::<ModelSpec>().is_err());
    }

    #[test]
    fn spike_modes() {
        let s = random_sparse_spike(10, 1, 1.0, SpikeMode::FixedSupport, Seed::new(1, 0)).unwrap();
        assert_eq!(s.direction[0].abs(), 1.0);
        let s = random_sparse_spike(10, 4, 1.0, SpikeMode::UniformKgrid, Seed::new(1, 0)).unwrap();
        assert!(s.direction.iter().all(|&x| x == 0.5));
        assert!(random_sparse_spike(3, 4, 1.0, SpikeMode::FixedSupport, Seed::new(1, 0)).is_err());
        let r = random_sparse_spike(50, 5, 1.0, SpikeMode::RandomSupport, Seed::new(2, 0)).unwrap();
        assert_eq!(r.support.len(), 5);
    }

    #[test]
    fn uniform_sphere_moments() {
        let draws = 10_000;
        let mut mean = [0.0; 3];
        let mut cov = [[0.0; 3]; 3];
        for t in 0..draws {
            let s = random_sparse_spike(5, 3, 1.0, SpikeMode::FixedSupport, Seed::new(3, t)).unwrap();
            for a in 0..3 {
                mean[a] += s.direction[a] / draws as f64;
                for b in 0..3 {
                    cov[a][b] += s.direction[a] * s.direction[b] / draws as f64;
                }
            }
        }
        for a in 0..3 {
            assert!(mean[a].abs() < 0.02);
            for b in 0..3 {
                let target = if a == b { 1.0 / 3.0 } else { 0.0 };
                assert!((cov[a][b] - target).abs() < 0.05 / 3.0, "{cov:?}");
            }
        }
    }

    #[test]
    fn null_sampler() {
        let (p, n) = (20, 1000);
        let x = sample_null(p, n, Seed::new(5, 0)).unwrap();
        let (m, _) = moments(x.as_slice());
        assert!(m.abs() < 4.0 / ((n * p) as f64).sqrt());
        let again = sample_null(p, n, Seed::new(5, 0)).unwrap();
        assert_eq!(x.row(0), again.row(0));
        let s = empirical_covariance(&x).unwrap();
        assert!((s.trace() / p as f64 - 1.0).abs() < 3.0 * (2.0 / (n * p) as f64).sqrt());
    }

    #[test]
    fn spiked_sampler_variances() {
        let spike = random_sparse_spike(30, 4, 1.5, SpikeMode::FixedSupport, Seed::new(8, 0)).unwrap();
        let n = 10_000;
        let x = sample_spiked(&spike, n, Seed::new(9, 0)).unwrap();
        let v = spike.vector();
        let mut w = vec![0.0; 30];
        w[20] = 1.0;
        let var = |u: &[f64]| x.rows().map(|r| r.iter().zip(u).map(|(a, b)| a * b).sum::<f64>().powi(2)).sum::<f64>() / n as f64;
        let band = 4.0 * 2.5 / (n as f64).sqrt();
        assert!((var(&v) - 2.5).abs() < band);
        assert!((var(&w) - 1.0).abs() < band);

        let zero = SpikeSpec { theta: 0.0, ..spike.clone() };
        assert!(sample_spiked(&zero, 10, Seed::new(1, 1)).is_err());
        let null = sample_null(30, 10, Seed::new(1, 1)).unwrap();
        let mut data = null.as_slice().to_vec();
        apply_spike(&mut data, 30, &zero);
        assert_eq!(data, null.as_slice());
    }

    #[test]
    fn sub_gaussian_families() {
        let x = sample_subgaussian(None, 10, 1000, SubGaussianFamily::Rademacher, Seed::new(1, 0)).unwrap();
        assert!(x.as_slice().iter().all(|&v| v == 1.0 || v == -1.0));
        let u = sample_subgaussian(None, 10, 1000, SubGaussianFamily::Uniform, Seed::new(1, 0)).unwrap();
        let (_, m2) = moments(u.as_slice());
        assert!((m2 - 1.0).abs() < 0.05);
    }

    #[test]
    fn lq_spikes_respect_budget() {
        for t in 0..100 {
            for q in [0.5, 1.0, 1.5] {
                let v = lq_spike(40, 4, q, Seed::new(7, t)).unwrap();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
                assert!(lq_norm(&v, q) <= 4f64.powf(1.0 / q - 0.5) * (1.0 + 1e-12));
            }
        }
        // dense tails do occur
        let v = lq_spike(40, 4, 1.5, Seed::new(7, 0)).unwrap();
        assert!(v.iter().filter(|&&x| x != 0.0).count() > 4);
        assert!(lq_spike(10, 2, 2.0, Seed::new(7, 0)).is_err());
    }

    #[test]
    fn adversarial_instance_is_hypothesis_free() {
        let mut seen = [false; 2];
        for t in 0..20 {
            let a = adversarial_covariance(30, 100, 3, 0.6, Seed::new(4, t)).unwrap();
            seen[a.hypothesis as usize] = true;
            let expect = SymMatrix::spiked_identity(&a.spike.vector(), 0.3);
            for (x, y) in a.matrix.packed().iter().zip(expect.packed()) {
                assert!((x - y).abs() < 1e-15);
            }
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn perturbation_budget() {
        let sigma = SymMatrix::identity(10);
        let zero = SymMatrix::zeros(10);
        assert_eq!(perturb(&sigma, &zero, 100, Some(0.05)).unwrap().matrix.packed(), sigma.packed());
        let b = (10f64 / 0.05).ln().sqrt() / 10.0;
        let ok = SymMatrix::from_fn(10, |_, _| 0.9 * b);
        assert!(perturb(&sigma, &ok, 100, Some(0.05)).is_ok());
        let bad = SymMatrix::from_fn(10, |_, _| 1.1 * b);
        assert!(perturb(&sigma, &bad, 100, Some(0.05)).is_err());
        assert!(!perturb(&sigma, &zero, 100, None).unwrap().delta_budget);
    }

    #[test]
    fn planted_clique() {
        let g = planted_clique_graph(12, 12, Seed::new(1, 0)).unwrap();
        assert_eq!(g.edge_count(), 66);
        let g = planted_clique_graph(100, 0, Seed::new(1, 0)).unwrap();
        let m = 4950.0;
        assert!((g.edge_count() as f64 - m / 2.0).abs() < 3.0 * (m / 4.0).sqrt());
        let g = planted_clique_graph(50, 8, Seed::new(2, 0)).unwrap();
        let s = g.planted.clone().unwrap();
        for &a in &s {
            for &b in &s {
                assert!(a == b || g.has_edge(a, b));
            }
            assert_eq!(g.adjacency.get(a, a), 0.0);
        }
        let mut out = Vec::new();
        g.write_edge_list(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), g.edge_count());
    }

    #[test]
    fn reduction_signs() {
        let g = planted_clique_graph(200, 30, Seed::new(3, 0)).unwrap();
        let x = clique_reduction(&g, Seed::new(3, 1)).unwrap();
        let s = g.planted.unwrap();
        for &i in &s {
            for &j in &s {
                if i < j {
                    assert!(x.get(i, j) > 0.0);
                }
            }
        }
        for i in 0..200 {
            for j in (i + 1)..200 {
                assert_eq!(x.get(i, j) > 0.0, g.adjacency.get(i, j) == 1.0);
            }
        }
    }

    #[test]
    fn model_spec_round_trips() {
        let m = ModelSpec::Spiked { p: 10, n: 5, k: 2, theta: 1.0, mode: SpikeMode::RandomSupport };
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<ModelSpec>(&s).unwrap(), m);
        assert_eq!(s.parse::<ModelSpec>().unwrap(), m);
        let a = m.sample(Seed::new(1, 2)).unwrap();
        let b = m.sample(Seed::new(1, 2)).unwrap();
        assert_eq!(a, b);
        assert!(ModelSpec::Adversarial { p: 5, n: 10, k: 2, theta: 0.5 }.sample(Seed::new(0, 0)).is_err());
    }
}
