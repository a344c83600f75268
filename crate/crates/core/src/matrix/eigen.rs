//! Symmetric eigensolvers.
//!
//! Small matrices go through cyclic Jacobi rotations, which give the full
//! spectrum (the spectahedron projection needs it). When only the top
//! eigenpair of a larger matrix is needed we run Lanczos with full
//! reorthogonalization and explicit restarts from the current Ritz vector.

use super::SymMatrix;
use crate::error::{Error, Result};

/// Default eigenvalue tolerance.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-10;

/// Above this dimension `largest_eigenvalue` switches from Jacobi to Lanczos.
pub const JACOBI_MAX_DIM: usize = 24;

const LANCZOS_BLOCK: usize = 48;
const LANCZOS_MAX_RESTARTS: usize = 400;

/// Top eigenpair of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Full eigendecomposition with eigenvalues in descending order.
///
/// `vectors` is column-major: eigenvector `j` occupies `vectors[j*p..(j+1)*p]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    dim: usize,
}

impl SymmetricEigen {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, j: usize) -> &[f64] {
        &self.vectors[j * self.dim..(j + 1) * self.dim]
    }
}

/// Cyclic Jacobi on a dense row-major buffer; returns descending eigenpairs.
pub(crate) fn jacobi_dense(mut a: Vec<f64>, n: usize) -> SymmetricEigen {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut zacc = vec![0.0; n];

    #[inline]
    fn rot(a: &mut [f64], n: usize, s: f64, tau: f64, (i, j): (usize, usize), (k, l): (usize, usize)) {
        let g = a[i * n + j];
        let h = a[k * n + l];
        a[i * n + j] = g - s * (h + g * tau);
        a[k * n + l] = h + s * (g - h * tau);
    }

    for sweep in 0..100 {
        let mut sm = 0.0;
        for ip in 0..n {
            for iq in (ip + 1)..n {
                sm += a[ip * n + iq].abs();
            }
        }
        if sm == 0.0 {
            break;
        }
        let tresh = if sweep < 3 { 0.2 * sm / (n * n) as f64 } else { 0.0 };
        for ip in 0..n {
            for iq in (ip + 1)..n {
                let apq = a[ip * n + iq];
                let g = 100.0 * apq.abs();
                if sweep > 3 && d[ip].abs() + g == d[ip].abs() && d[iq].abs() + g == d[iq].abs() {
                    a[ip * n + iq] = 0.0;
                } else if apq.abs() > tresh {
                    let h = d[iq] - d[ip];
                    let t = if h.abs() + g == h.abs() {
                        apq / h
                    } else {
                        let theta = 0.5 * h / apq;
                        let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                        if theta < 0.0 {
                            -t
                        } else {
                            t
                        }
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    let h = t * apq;
                    zacc[ip] -= h;
                    zacc[iq] += h;
                    d[ip] -= h;
                    d[iq] += h;
                    a[ip * n + iq] = 0.0;
                    for j in 0..ip {
                        rot(&mut a, n, s, tau, (j, ip), (j, iq));
                    }
                    for j in (ip + 1)..iq {
                        rot(&mut a, n, s, tau, (ip, j), (j, iq));
                    }
                    for j in (iq + 1)..n {
                        rot(&mut a, n, s, tau, (ip, j), (iq, j));
                    }
                    for j in 0..n {
                        rot(&mut v, n, s, tau, (j, ip), (j, iq));
                    }
                }
            }
        }
        for i in 0..n {
            b[i] += zacc[i];
            d[i] = b[i];
            zacc[i] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[y].total_cmp(&d[x]).then(x.cmp(&y)));
    let values = order.iter().map(|&j| d[j]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[col * n + i] = v[i * n + j];
        }
    }
    SymmetricEigen {
        values,
        vectors,
        dim: n,
    }
}

/// Full symmetric eigendecomposition (cyclic Jacobi).
pub fn symmetric_eigen(a: &SymMatrix) -> Result<SymmetricEigen> {
    a.ensure_finite()?;
    Ok(jacobi_dense(a.to_dense(), a.dim()))
}

/// Largest eigenvalue and a unit eigenvector.
///
/// `value` is within `tol` of `lambda_max(A)` and the returned vector satisfies
/// `|Av - value v| <= tol (1 + |value|)`.
pub fn largest_eigenvalue(a: &SymMatrix, tol: f64) -> Result<EigenPair> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    a.ensure_finite()?;
    let p = a.dim();
    if p <= JACOBI_MAX_DIM {
        let eig = jacobi_dense(a.to_dense(), p);
        let mut vector = eig.vector(0).to_vec();
        normalize(&mut vector);
        return Ok(EigenPair {
            value: eig.values[0],
            vector,
        });
    }
    lanczos_largest(|x, y| a.matvec(x, y), p, None, tol)
}

/// Deterministic start vector with no special alignment to coordinate axes
/// or the all-ones direction.
fn default_start(p: usize) -> Vec<f64> {
    let mut s: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut v: Vec<f64> = (0..p)
        .map(|_| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            0.5 + (s >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect();
    normalize(&mut v);
    v
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Top eigenpair of the symmetric operator `matvec` of dimension `p`.
///
/// `start` (if given and nonzero) seeds the Krylov space; passing the
/// eigenvector of a nearby operator makes repeated solves cheap.
pub fn lanczos_largest(
    mut matvec: impl FnMut(&[f64], &mut [f64]),
    p: usize,
    start: Option<&[f64]>,
    tol: f64,
) -> Result<EigenPair> {
    let mut q0 = match start {
        Some(s) if s.len() == p && dot(s, s) > 0.0 => {
            let mut v = s.to_vec();
            // Blend in a little of the generic start so that a start vector
            // orthogonal to the top eigenspace cannot stall the iteration.
            let g = default_start(p);
            v.iter_mut().zip(&g).for_each(|(x, y)| *x += 1e-3 * y);
            normalize(&mut v);
            v
        }
        _ => default_start(p),
    };
    let m = p.min(LANCZOS_BLOCK);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut w = vec![0.0; p];
    let mut best = (f64::NEG_INFINITY, q0.clone());

    for _restart in 0..LANCZOS_MAX_RESTARTS {
        basis.clear();
        basis.push(q0.clone());
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut invariant = false;
        for j in 0..m {
            matvec(&basis[j], &mut w);
            let a = dot(&basis[j], &w);
            alpha.push(a);
            for (wi, qi) in w.iter_mut().zip(&basis[j]) {
                *wi -= a * qi;
            }
            if j > 0 {
                let b = beta[j - 1];
                for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi -= b * qi;
                }
            }
            // full reorthogonalization, two passes
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= c * qi;
                    }
                }
            }
            let b = dot(&w, &w).sqrt();
            let scale = alpha.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(1e-300);
            if b <= 1e-13 * scale || j + 1 == p {
                invariant = b <= 1e-13 * scale || j + 1 == p;
                beta.push(b);
                break;
            }
            beta.push(b);
            if j + 1 < m {
                basis.push(w.iter().map(|x| x / b).collect());
            }
        }
        let k = alpha.len();
        let mut t = vec![0.0; k * k];
        for i in 0..k {
            t[i * k + i] = alpha[i];
            if i + 1 < k {
                t[i * k + i + 1] = beta[i];
                t[(i + 1) * k + i] = beta[i];
            }
        }
        let eig = jacobi_dense(t, k);
        let theta = eig.values[0];
        let s = eig.vector(0);
        let mut y = vec![0.0; p];
        for (c, q) in s.iter().zip(&basis) {
            for (yi, qi) in y.iter_mut().zip(q) {
                *yi += c * qi;
            }
        }
        normalize(&mut y);
        let estimated = if invariant { 0.0 } else { (beta[k - 1] * s[k - 1]).abs() };
        if theta > best.0 {
            best = (theta, y.clone());
        }
        if estimated <= tol * (1.0 + theta.abs()) {
            matvec(&y, &mut w);
            let rq = dot(&y, &w);
            let resid = w
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - rq * b).powi(2))
                .sum::<f64>()
                .sqrt();
            if resid <= tol * (1.0 + rq.abs()) {
                return Ok(EigenPair { value: rq, vector: y });
            }
        }
        q0 = y;
    }
    Err(Error::NotConverged {
        lower: best.0,
        upper: f64::INFINITY,
        iterations: LANCZOS_MAX_RESTARTS,
    })
}
