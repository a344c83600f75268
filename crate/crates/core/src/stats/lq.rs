//! Helpers for spikes that are only approximately sparse (small ℓq norm).

use crate::error::{invalid, Error, Result};

/// Unit-norm tolerance accepted by [`sparse_truncate`].
const UNIT_TOL: f64 = 1e-10;

/// `(sum |v_i|^q)^(1/q)`; a quasi-norm for `q < 1`.
pub fn lq_norm(v: &[f64], q: f64) -> f64 {
    v.iter().map(|x| x.abs().powf(q)).sum::<f64>().powf(1.0 / q)
}

/// Effective sparsity `ceil(k * eps^(1 / (1 - 2/q)))` for an ℓq-sparse spike.
pub fn k_q(k: usize, q: f64, eps: f64) -> Result<usize> {
    if !(q > 0.0 && q < 2.0) {
        return Err(invalid(format!("q must lie in (0, 2), got {q}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    if k < 1 {
        return Err(invalid("k must be at least 1"));
    }
    let x = k as f64 * eps.powf(1.0 / (1.0 - 2.0 / q));
    // 10 * 0.5^-1 may land a few ulps above 20; do not round that up to 21
    let r = x.round();
    let kq = if (x - r).abs() <= 1e-9 * r.max(1.0) { r } else { x.ceil() };
    Ok((kq as usize).max(k))
}

/// Keeps the `r` largest-magnitude coordinates of a unit vector (ties by
/// smallest index) and renormalizes.
pub fn sparse_truncate(v: &[f64], r: usize) -> Result<Vec<f64>> {
    let p = v.len();
    if r < 1 || r > p {
        return Err(invalid(format!("r = {r} must lie in 1..={p}")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("vector has non-finite entries".into()));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(invalid("cannot truncate the zero vector"));
    }
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(invalid(format!("expected a unit vector, |v|_2 = {norm}")));
    }
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    let mut x = vec![0.0; p];
    for &i in &idx[..r] {
        x[i] = v[i];
    }
    let kept = x.iter().map(|t| t * t).sum::<f64>().sqrt();
    if kept == 0.0 {
        return Err(invalid("kept coordinates are all zero"));
    }
    x.iter_mut().for_each(|t| *t /= kept);
    Ok(x)
}
