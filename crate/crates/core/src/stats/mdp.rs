//! Minimum dual perturbation
//! `MDP_k(A) = min_{z >= 0} lambda_max(st_z(A)) + k z`.

use super::{check_k, StatKind, StatValue};
use crate::error::{invalid, Result};
use crate::matrix::{eigen_dense, lanczos_largest, soft, SymMatrix, DEFAULT_EIGEN_TOL, JACOBI_MAX_DIM};

pub const DEFAULT_GRID_SIZE: usize = 512;

/// Number of grid local minima that get a golden-section refinement.
const REFINED_CELLS: usize = 3;
const GOLDEN_ITERS: usize = 80;

/// `st_z(A)` for any `z` without rebuilding the matrix: off-diagonal entries
/// are kept sorted by magnitude, so the surviving ones form a prefix.
pub(crate) struct ThresholdedOperator {
    p: usize,
    diag: Vec<f64>,
    max_diag: f64,
    off: Vec<(usize, usize, f64)>,
}

impl ThresholdedOperator {
    pub(crate) fn new(a: &SymMatrix) -> Self {
        let p = a.dim();
        let diag = a.diag();
        let max_diag = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut off = Vec::with_capacity(p * (p - 1) / 2);
        for i in 0..p {
            for (d, &x) in a.upper_row(i).iter().enumerate().skip(1) {
                if x != 0.0 {
                    off.push((i, i + d, x));
                }
            }
        }
        off.sort_by(|a, b| b.2.abs().total_cmp(&a.2.abs()));
        ThresholdedOperator { p, diag, max_diag, off }
    }

    fn active(&self, z: f64) -> usize {
        self.off.partition_point(|e| e.2.abs() > z)
    }

    /// `max_i st_z(A)_ii`, a lower bound on `lambda_max(st_z(A))`.
    pub(crate) fn diag_bound(&self, z: f64) -> f64 {
        // soft(., z) is nondecreasing, so the largest diagonal entry wins
        soft(self.max_diag, z)
    }

    fn matvec(&self, z: f64, count: usize, x: &[f64], y: &mut [f64]) {
        for ((yi, &d), &xi) in y.iter_mut().zip(&self.diag).zip(x) {
            *yi = soft(d, z) * xi;
        }
        for &(i, j, a) in &self.off[..count] {
            let s = soft(a, z);
            y[i] += s * x[j];
            y[j] += s * x[i];
        }
    }

    fn dense(&self, z: f64, count: usize) -> Vec<f64> {
        let p = self.p;
        let mut m = vec![0.0; p * p];
        for (i, &d) in self.diag.iter().enumerate() {
            m[i * p + i] = soft(d, z);
        }
        for &(i, j, a) in &self.off[..count] {
            let s = soft(a, z);
            m[i * p + j] = s;
            m[j * p + i] = s;
        }
        m
    }
}

/// Evaluates `phi(z) = lambda_max(st_z(A)) + k z`, reusing the previous
/// eigenvector as a Lanczos start.
pub(crate) struct Objective {
    op: ThresholdedOperator,
    k: f64,
    warm: Option<Vec<f64>>,
    pub(crate) evaluations: usize,
}

impl Objective {
    pub(crate) fn new(a: &SymMatrix, k: usize) -> Self {
        Objective {
            op: ThresholdedOperator::new(a),
            k: k as f64,
            warm: None,
            evaluations: 0,
        }
    }

    pub(crate) fn lower_bound(&self, z: f64) -> f64 {
        self.op.diag_bound(z) + self.k * z
    }

    pub(crate) fn lambda(&mut self, z: f64) -> Result<f64> {
        self.evaluations += 1;
        let p = self.op.p;
        let count = self.op.active(z);
        if count == 0 {
            return Ok(self.op.diag_bound(z));
        }
        if p <= JACOBI_MAX_DIM {
            return Ok(eigen_dense(self.op.dense(z, count), p).values[0]);
        }
        let op = &self.op;
        let pair = lanczos_largest(
            |x, y| op.matvec(z, count, x, y),
            p,
            self.warm.as_deref(),
            DEFAULT_EIGEN_TOL,
        )?;
        self.warm = Some(pair.vector);
        Ok(pair.value)
    }

    pub(crate) fn phi(&mut self, z: f64) -> Result<f64> {
        Ok(self.lambda(z)? + self.k * z)
    }

    /// `x^T st_z(A) x + k z` for the last computed eigenvector `x`: a lower
    /// bound on `phi(z)` that costs a single product.
    pub(crate) fn rayleigh_bound(&self, z: f64) -> Option<f64> {
        let x = self.warm.as_deref()?;
        let mut y = vec![0.0; x.len()];
        self.op.matvec(z, self.op.active(z), x, &mut y);
        let q: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let norm2: f64 = x.iter().map(|a| a * a).sum();
        Some(q / norm2 + self.k * z)
    }
}

fn validate(a: &SymMatrix, k: usize) -> Result<()> {
    a.ensure_finite()?;
    check_k(k, a.dim())
}

/// `lambda_max(st_z(A)) + k z` at a single threshold level.
pub fn mdp_objective(a: &SymMatrix, k: usize, z: f64) -> Result<f64> {
    validate(a, k)?;
    if !(z >= 0.0) || !z.is_finite() {
        return Err(invalid(format!("threshold z must be finite and >= 0, got {z}")));
    }
    Objective::new(a, k).phi(z)
}

/// Minimizes `phi` over a uniform grid on `[0, |A|_inf]`, then refines the
/// best grid cells by golden-section search.
///
/// `phi(z) = k z` beyond `|A|_inf`, so the interval is sufficient. Grid points
/// whose lower bound `k z + max_i st_z(A)_ii` already exceeds the incumbent
/// are skipped, as are points where the Rayleigh quotient of the previous
/// eigenvector does. `phi` is not assumed unimodal: the grid decides which
/// cells are refined and the reported value is the smallest one evaluated.
pub fn mdp(a: &SymMatrix, k: usize, grid_size: usize) -> Result<StatValue> {
    validate(a, k)?;
    if grid_size < 2 {
        return Err(invalid(format!("grid_size must be at least 2, got {grid_size}")));
    }
    let zmax = a.max_abs();
    let mut obj = Objective::new(a, k);
    let mut best = (obj.phi(0.0)?, 0.0);
    if zmax == 0.0 {
        return Ok(finish(best, obj.evaluations));
    }
    let h = zmax / (grid_size - 1) as f64;
    let mut vals = vec![f64::INFINITY; grid_size];
    vals[0] = best.0;
    for (i, v) in vals.iter_mut().enumerate().skip(1) {
        let z = i as f64 * h;
        // the bound is nondecreasing in z and the incumbent only improves
        if obj.lower_bound(z) > best.0 {
            break;
        }
        if obj.rayleigh_bound(z).is_some_and(|b| b > best.0) {
            continue;
        }
        *v = obj.phi(z)?;
        if *v < best.0 {
            best = (*v, z);
        }
    }

    let mut minima: Vec<usize> = (0..grid_size)
        .filter(|&i| {
            vals[i].is_finite()
                && (i == 0 || vals[i] <= vals[i - 1])
                && (i + 1 == grid_size || vals[i] <= vals[i + 1])
        })
        .collect();
    minima.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    minima.truncate(REFINED_CELLS);
    for i in minima {
        let lo = i.saturating_sub(1) as f64 * h;
        let hi = ((i + 1).min(grid_size - 1)) as f64 * h;
        let (v, z) = golden(&mut obj, lo, hi)?;
        if v < best.0 {
            best = (v, z);
        }
    }
    Ok(finish(best, obj.evaluations))
}

fn finish((value, z): (f64, f64), evaluations: usize) -> StatValue {
    StatValue {
        z_star: Some(z),
        iterations: evaluations,
        ..StatValue::plain(StatKind::Mdp, value)
    }
}

/// Golden-section search on `[lo, hi]`; returns the best point evaluated.
fn golden(obj: &mut Objective, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = obj.phi(x1)?;
    let mut f2 = obj.phi(x2)?;
    let mut best = if f1 <= f2 { (f1, x1) } else { (f2, x2) };
    for _ in 0..GOLDEN_ITERS {
        if hi - lo <= 1e-13 * (1.0 + hi.abs()) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = obj.phi(x1)?;
            if f1 < best.0 {
                best = (f1, x1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = obj.phi(x2)?;
            if f2 < best.0 {
                best = (f2, x2);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::largest_eigenvalue;

    fn wishart(p: usize, n: usize, seed: u64) -> SymMatrix {
        let mut r = crate::rng::Seed::new(seed, 0).rng();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| r.gaussian()).collect())
            .collect();
        crate::matrix::empirical_covariance(&crate::matrix::DataMatrix::from_rows(&rows).unwrap())
            .unwrap()
    }

    #[test]
    fn identity_is_one_at_zero() {
        let s = mdp(&SymMatrix::identity(6), 2, DEFAULT_GRID_SIZE).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert_eq!(s.z_star, Some(0.0));
    }

    #[test]
    fn small_offdiagonal_bound() {
        let p = 8;
        let z0 = 0.05;
        let a = SymMatrix::from_fn(p, |i, j| {
            if i == j {
                1.0
            } else {
                z0 * (((i * 3 + j * 5) % 7) as f64 / 3.0 - 1.0)
            }
        });
        assert!(a.max_abs_offdiag() <= z0);
        let s = mdp(&a, 3, DEFAULT_GRID_SIZE).unwrap();
        assert!(s.value <= 1.0 + 3.0 * z0 + 1e-12);
    }

    #[test]
    fn objective_matches_direct_evaluation() {
        for p in [10, 40] {
            let a = wishart(p, 2 * p, p as u64);
            for z in [0.0, 0.03, 0.1, 0.4] {
                let direct = largest_eigenvalue(&a.soft_threshold(z).unwrap(), 1e-12).unwrap().value + 3.0 * z;
                let fast = mdp_objective(&a, 3, z).unwrap();
                assert!((direct - fast).abs() < 1e-8, "p={p} z={z}: {direct} vs {fast}");
            }
        }
    }

    #[test]
    fn bounded_by_top_eigenvalue_and_min_of_grid() {
        let a = wishart(12, 30, 5);
        let s = mdp(&a, 3, 64).unwrap();
        let top = largest_eigenvalue(&a, 1e-12).unwrap().value;
        assert!(s.value <= top + 1e-12);
        let z = s.z_star.unwrap();
        assert!(z >= 0.0);
        assert!((mdp_objective(&a, 3, z).unwrap() - s.value).abs() < 1e-10);
        let coarse = (0..2000)
            .map(|i| mdp_objective(&a, 3, i as f64 * a.max_abs() / 1999.0).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(s.value <= coarse + 1e-9);
    }

    #[test]
    fn rejects_bad_arguments() {
        let a = SymMatrix::identity(3);
        assert!(mdp(&a, 0, 10).is_err());
        assert!(mdp(&a, 4, 10).is_err());
        assert!(mdp(&a, 1, 1).is_err());
        assert!(mdp_objective(&a, 1, -0.1).is_err());
    }
}
