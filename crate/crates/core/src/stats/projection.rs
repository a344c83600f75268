//! Euclidean projections used by the SDP solver.

use crate::matrix::eigen_dense;

/// Projects `v` onto the simplex `{x >= 0, sum x = total}` in place.
pub(crate) fn project_simplex(v: &mut [f64], total: f64) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - total) / (i + 1) as f64;
        if ui - t > 0.0 {
            tau = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - tau).max(0.0));
}

/// Projects `v` onto the l1 ball of the given radius in place.
pub(crate) fn project_l1_ball(v: &mut [f64], radius: f64) {
    let norm: f64 = v.iter().map(|x| x.abs()).sum();
    if norm <= radius {
        return;
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    project_simplex(&mut mags, radius);
    for (x, m) in v.iter_mut().zip(mags) {
        *x = m.copysign(*x);
    }
}

/// Projects a dense symmetric `p x p` matrix onto the spectahedron
/// `{Z >= 0, Tr Z = 1}`.
pub(crate) fn project_spectahedron(m: &[f64], p: usize) -> Vec<f64> {
    let eig = eigen_dense(m.to_vec(), p);
    let mut w = eig.values.clone();
    project_simplex(&mut w, 1.0);
    let mut out = vec![0.0; p * p];
    for (j, &wj) in w.iter().enumerate() {
        if wj <= 0.0 {
            continue;
        }
        let v = eig.vector(j);
        for a in 0..p {
            let va = wj * v[a];
            if va == 0.0 {
                continue;
            }
            let row = &mut out[a * p..(a + 1) * p];
            for (r, &vb) in row.iter_mut().zip(v) {
                *r += va * vb;
            }
        }
    }
    out
}
