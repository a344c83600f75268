//! Exhaustive k-sparse largest eigenvalue
//! `lambda^k_max(A) = max_{|S| = k} lambda_max(A_S)`.

use super::{check_k, diag_stat, StatKind, StatValue};
use crate::error::{Error, Result};
use crate::matrix::{eigen_dense, largest_eigenvalue, lanczos_largest, SymMatrix, DEFAULT_EIGEN_TOL, JACOBI_MAX_DIM};

/// Largest number of subsets the exhaustive search will visit by default.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// Values closer than this are treated as ties.
const TIE_TOL: f64 = 1e-12;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) is divisible by (i + 1) after the multiplication
        c = match c.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    c
}

/// Revolving-door enumeration of the `t`-subsets of `0..n` (Knuth's
/// Algorithm R). Consecutive subsets differ by exactly one element.
#[derive(Debug, Clone)]
pub struct RevolvingDoor {
    t: usize,
    // c[1..=t] ascending, c[t+1] = n; c[0] unused
    c: Vec<usize>,
}

impl RevolvingDoor {
    pub fn new(n: usize, t: usize) -> Self {
        assert!(t >= 1 && t <= n, "need 1 <= t <= n");
        let mut c = vec![0; t + 2];
        for j in 1..=t {
            c[j] = j - 1;
        }
        c[t + 1] = n;
        RevolvingDoor { t, c }
    }

    /// Current subset, ascending.
    pub fn current(&self) -> &[usize] {
        &self.c[1..=self.t]
    }

    /// Moves to the next subset; returns `false` once the sequence is done.
    pub fn advance(&mut self) -> bool {
        let t = self.t;
        let c = &mut self.c;
        let mut j = 2;
        let mut try_decrease;
        if t % 2 == 1 {
            if c[1] + 1 < c[2] {
                c[1] += 1;
                return true;
            }
            try_decrease = true;
        } else {
            if c[1] > 0 {
                c[1] -= 1;
                return true;
            }
            try_decrease = false;
        }
        loop {
            if j > t {
                return false;
            }
            if try_decrease {
                if c[j] >= j {
                    c[j] = c[j - 1];
                    c[j - 1] = j - 2;
                    return true;
                }
            } else if c[j] + 1 < c[j + 1] {
                c[j - 1] = c[j];
                c[j] += 1;
                return true;
            }
            j += 1;
            try_decrease = !try_decrease;
        }
    }
}

fn top_eigenvalue_dense(buf: &[f64], k: usize) -> f64 {
    if k <= JACOBI_MAX_DIM {
        eigen_dense(buf.to_vec(), k).values[0]
    } else {
        let mv = |x: &[f64], y: &mut [f64]| {
            for i in 0..k {
                y[i] = buf[i * k..(i + 1) * k].iter().zip(x).map(|(a, b)| a * b).sum();
            }
        };
        lanczos_largest(mv, k, None, DEFAULT_EIGEN_TOL)
            .map(|e| e.value)
            .unwrap_or_else(|_| eigen_dense(buf.to_vec(), k).values[0])
    }
}

/// Support of the `k` largest-magnitude coordinates (ties by smallest index).
fn top_k_support(v: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    let mut s = idx[..k].to_vec();
    s.sort_unstable();
    s
}

/// Lower bound from restricting to the top eigenvector's largest coordinates.
fn greedy_candidate(a: &SymMatrix, k: usize) -> Result<(f64, Vec<usize>)> {
    let top = largest_eigenvalue(a, DEFAULT_EIGEN_TOL)?;
    let s = top_k_support(&top.vector, k);
    let sub = a.principal_submatrix(&s)?;
    Ok((top_eigenvalue_dense(&sub.to_dense(), k), s))
}

pub fn lambda_k_max(a: &SymMatrix, k: usize) -> Result<StatValue> {
    lambda_k_max_with_budget(a, k, DEFAULT_ENUMERATION_BUDGET)
}

/// Exact `lambda^k_max(A)` with an attaining support.
///
/// Subsets whose Gershgorin bound falls below the incumbent are skipped; every
/// other subset is solved exactly, so the result is the true maximum. Among
/// supports within `1e-12` of the maximum the lexicographically smallest one
/// is reported.
pub fn lambda_k_max_with_budget(a: &SymMatrix, k: usize, budget: u128) -> Result<StatValue> {
    a.ensure_finite()?;
    let p = a.dim();
    check_k(k, p)?;
    let subsets = binomial(p, k);
    if subsets > budget {
        return Err(Error::BudgetExceeded {
            p,
            k,
            subsets,
            budget,
        });
    }
    if k == 1 {
        let d = diag_stat(a);
        return Ok(StatValue {
            name: StatKind::LambdaK,
            iterations: p,
            ..d
        });
    }
    if k == p {
        let top = largest_eigenvalue(a, DEFAULT_EIGEN_TOL)?;
        return Ok(StatValue {
            support: Some((0..p).collect()),
            iterations: 1,
            ..StatValue::plain(StatKind::LambdaK, top.value)
        });
    }

    let dense = a.to_dense();
    let (mut best_val, mut best_set) = greedy_candidate(a, k)?;

    let mut door = RevolvingDoor::new(p, k);
    let mut cur: Vec<usize> = door.current().to_vec();
    let mut buf = vec![0.0; k * k];
    for r in 0..k {
        for s in 0..k {
            buf[r * k + s] = dense[cur[r] * p + cur[s]];
        }
    }
    let mut solved = 0usize;
    loop {
        let mut bound = f64::NEG_INFINITY;
        for r in 0..k {
            let row = &buf[r * k..(r + 1) * k];
            let off: f64 = row.iter().map(|x| x.abs()).sum::<f64>() - row[r].abs();
            bound = bound.max(row[r] + off);
        }
        if bound >= best_val - TIE_TOL {
            let val = top_eigenvalue_dense(&buf, k);
            solved += 1;
            if val > best_val + TIE_TOL {
                best_val = val;
                best_set.clear();
                best_set.extend_from_slice(&cur);
            } else if val >= best_val - TIE_TOL {
                if cur.as_slice() < best_set.as_slice() {
                    best_set.clear();
                    best_set.extend_from_slice(&cur);
                }
                best_val = best_val.max(val);
            }
        }
        if !door.advance() {
            break;
        }
        // at most two positions change; rewriting each changed row and column
        // in turn leaves every entry consistent with `cur`
        let next = door.current();
        for r in 0..k {
            if next[r] != cur[r] {
                cur[r] = next[r];
                for s in 0..k {
                    let x = dense[cur[r] * p + cur[s]];
                    buf[r * k + s] = x;
                    buf[s * k + r] = x;
                }
            }
        }
    }
    Ok(StatValue {
        support: Some(best_set),
        iterations: solved,
        ..StatValue::plain(StatKind::LambdaK, best_val)
    })
}

/// Decides `lambda^k_max(A) > tau` exactly, using cheap bounds before
/// falling back to the exhaustive search.
///
/// `max_i A_ii <= lambda^k_max(A) <= lambda_max(A)` settles most calls
/// without enumerating subsets.
pub fn lambda_k_exceeds(a: &SymMatrix, k: usize, tau: f64, budget: u128) -> Result<bool> {
    a.ensure_finite()?;
    check_k(k, a.dim())?;
    if diag_stat(a).value > tau {
        return Ok(true);
    }
    let top = largest_eigenvalue(a, DEFAULT_EIGEN_TOL)?;
    // the eigen tolerance keeps this bound conservative
    if top.value + 2.0 * DEFAULT_EIGEN_TOL * (1.0 + top.value.abs()) <= tau {
        return Ok(false);
    }
    let (greedy, _) = greedy_candidate(a, k)?;
    if greedy > tau {
        return Ok(true);
    }
    Ok(lambda_k_max_with_budget(a, k, budget)?.value > tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 3), 56);
        assert_eq!(binomial(50, 5), 2_118_760);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(500, 250), u128::MAX);
    }

    #[test]
    fn revolving_door_visits_every_subset_once_with_single_swaps() {
        for n in 1..=9 {
            for t in 1..=n {
                let mut door = RevolvingDoor::new(n, t);
                let mut seen = HashSet::new();
                let mut prev: Vec<usize> = door.current().to_vec();
                seen.insert(prev.clone());
                while door.advance() {
                    let cur = door.current().to_vec();
                    assert!(cur.windows(2).all(|w| w[0] < w[1]), "{cur:?}");
                    assert!(cur.iter().all(|&x| x < n));
                    let a: HashSet<_> = prev.iter().collect();
                    let b: HashSet<_> = cur.iter().collect();
                    assert_eq!(a.difference(&b).count(), 1, "{prev:?} -> {cur:?}");
                    assert!(seen.insert(cur.clone()), "repeat {cur:?}");
                    prev = cur;
                }
                assert_eq!(seen.len() as u128, binomial(n, t), "n={n} t={t}");
            }
        }
    }

    #[test]
    fn identity_gives_one_with_first_support() {
        let s = lambda_k_max(&SymMatrix::identity(7), 3).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert_eq!(s.support, Some(vec![0, 1, 2]));
    }

    #[test]
    fn clique_adjacency_reaches_k() {
        // unit diagonal, clique on {1, 3, 4, 6}, a few extra edges
        let p = 8;
        let clique = [1, 3, 4, 6];
        let mut a = SymMatrix::identity(p);
        for &i in &clique {
            for &j in &clique {
                if i != j {
                    a.set(i, j, 1.0);
                }
            }
        }
        a.set(0, 2, 1.0);
        a.set(5, 7, 1.0);
        let s = lambda_k_max(&a, 4).unwrap();
        assert!((s.value - 4.0).abs() < 1e-10);
        assert_eq!(s.support, Some(clique.to_vec()));
        // no 5-clique, so the value stays below 5
        assert!(lambda_k_max(&a, 5).unwrap().value < 5.0 - 1e-6);
    }

    #[test]
    fn sparse_spike_support_is_recovered() {
        let p = 10;
        let mut v = vec![0.0; p];
        v[2] = 0.5;
        v[5] = -0.5;
        v[8] = 0.5f64.sqrt();
        let a = SymMatrix::spiked_identity(&v, 0.9);
        let s = lambda_k_max(&a, 3).unwrap();
        assert!((s.value - 1.9).abs() < 1e-12);
        assert_eq!(s.support, Some(vec![2, 5, 8]));
    }

    #[test]
    fn errors() {
        let a = SymMatrix::identity(5);
        assert!(lambda_k_max(&a, 6).is_err());
        assert!(lambda_k_max(&a, 0).is_err());
        let big = SymMatrix::identity(60);
        assert!(matches!(
            lambda_k_max(&big, 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn k_equal_one_matches_diag() {
        let a = SymMatrix::from_fn(6, |i, j| if i == j { (i as f64 * 1.3).cos() } else { 0.1 });
        assert_eq!(lambda_k_max(&a, 1).unwrap().value, diag_stat(&a).value);
    }

    #[test]
    fn exceeds_agrees_with_value() {
        let a = SymMatrix::from_fn(9, |i, j| ((i * 7 + j * 3) as f64).sin() * if i == j { 0.2 } else { 0.3 } + if i == j { 1.0 } else { 0.0 });
        let v = lambda_k_max(&a, 3).unwrap().value;
        for tau in [v - 0.5, v - 1e-6, v + 1e-6, v + 0.5] {
            assert_eq!(lambda_k_exceeds(&a, 3, tau, DEFAULT_ENUMERATION_BUDGET).unwrap(), v > tau);
        }
    }
}
