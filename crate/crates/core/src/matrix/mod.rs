//! Dense symmetric matrix primitives.
//!
//! [`SymMatrix`] keeps a single packed copy of the upper triangle, so symmetry
//! holds structurally for every value built through this module. Row `i` of
//! the packed buffer holds the entries `(i, i..p)` contiguously.

mod eigen;
mod io;

pub use eigen::{
    largest_eigenvalue, lanczos_largest, symmetric_eigen, EigenPair, SymmetricEigen,
    DEFAULT_EIGEN_TOL, JACOBI_MAX_DIM,
};
pub(crate) use eigen::jacobi_dense as eigen_dense;
pub use io::{parse_matrix_text, write_matrix_text, ASYMMETRY_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative tolerance for the advisory PSD check.
pub const TOL_PSD: f64 = 1e-8;

/// Dense symmetric `p x p` real matrix stored as its packed upper triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
    #[serde(default)]
    psd: bool,
}

#[inline]
fn row_offset(p: usize, i: usize) -> usize {
    // sum_{r < i} (p - r)
    i * p - i * i.saturating_sub(1) / 2
}

impl SymMatrix {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        packed_index(self.dim, i, j)
    }

    /// Zero matrix. Panics if `p == 0`.
    pub fn zeros(p: usize) -> Self {
        assert!(p >= 1, "SymMatrix dimension must be at least 1");
        SymMatrix {
            dim: p,
            data: vec![0.0; p * (p + 1) / 2],
            psd: false,
        }
    }

    pub fn identity(p: usize) -> Self {
        let mut m = Self::zeros(p);
        for i in 0..p {
            m.set(i, i, 1.0);
        }
        m.psd = true;
        m
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(d: &[f64]) -> Result<Self> {
        if d.is_empty() {
            return Err(invalid("diagonal of length zero"));
        }
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, x);
        }
        Ok(m)
    }

    /// Builds a matrix from `f(i, j)` evaluated for `i <= j` only.
    pub fn from_fn(p: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(p);
        let mut k = 0;
        for i in 0..p {
            for j in i..p {
                m.data[k] = f(i, j);
                k += 1;
            }
        }
        m
    }

    /// Builds a matrix from a row-major dense buffer, rejecting asymmetry
    /// larger than `tol` (absolute). The upper triangle is kept.
    pub fn from_dense(p: usize, dense: &[f64], tol: f64) -> Result<Self> {
        if p == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if dense.len() != p * p {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {p}x{p} matrix, got {}",
                p * p,
                dense.len()
            )));
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let (a, b) = (dense[i * p + j], dense[j * p + i]);
                if (a - b).abs() > tol || a.is_nan() != b.is_nan() {
                    return Err(invalid(format!(
                        "matrix not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(Self::from_fn(p, |i, j| dense[i * p + j]))
    }

    /// Population covariance `I_p + theta * v v^T`.
    pub fn spiked_identity(v: &[f64], theta: f64) -> Self {
        let mut m = Self::from_fn(v.len(), |i, j| theta * v[i] * v[j]);
        for i in 0..v.len() {
            let d = m.get(i, i);
            m.set(i, i, 1.0 + d);
        }
        m.psd = theta >= 0.0;
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    /// Sets `A_ij` (and therefore `A_ji`).
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        let k = self.idx(i, j);
        self.data[k] = x;
    }

    /// Packed upper triangle, row-major.
    pub fn packed(&self) -> &[f64] {
        &self.data
    }

    /// Contiguous slice holding `A_{i, i..p}`.
    #[inline]
    pub fn upper_row(&self, i: usize) -> &[f64] {
        let start = packed_index(self.dim, i, i);
        &self.data[start..start + self.dim - i]
    }

    /// Advisory flag marking the matrix as positive semidefinite.
    pub fn is_psd_flagged(&self) -> bool {
        self.psd
    }

    pub fn with_psd_flag(mut self, psd: bool) -> Self {
        self.psd = psd;
        self
    }

    /// Full row-major `p x p` copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let p = self.dim;
        let mut out = vec![0.0; p * p];
        for i in 0..p {
            for (off, &x) in self.upper_row(i).iter().enumerate() {
                let j = i + off;
                out[i * p + j] = x;
                out[j * p + i] = x;
            }
        }
        out
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Entrywise sup-norm `|A|_inf = max_ij |A_ij|`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest off-diagonal magnitude (0 for `p = 1`).
    pub fn max_abs_offdiag(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            for &x in &self.upper_row(i)[1..] {
                m = m.max(x.abs());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub(crate) fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite("matrix has non-finite entries".into()))
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let p = self.dim;
        debug_assert_eq!(x.len(), p);
        debug_assert_eq!(y.len(), p);
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..p {
            let row = self.upper_row(i);
            let xi = x[i];
            let mut acc = row[0] * xi;
            for (off, &a) in row.iter().enumerate().skip(1) {
                let j = i + off;
                acc += a * x[j];
                y[j] += a * xi;
            }
            y[i] += acc;
        }
    }

    /// Quadratic form `x^T A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.dim];
        self.matvec(x, &mut y);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    /// Entrywise sum; dimensions must agree.
    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "cannot add {}x{0} and {}x{1}",
                self.dim, other.dim
            )));
        }
        Ok(SymMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
            psd: false,
        })
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| c * a).collect(),
            psd: self.psd && c >= 0.0,
        }
    }

    /// `(A_ij)_{i,j in S}` with `S` taken in sorted order.
    pub fn principal_submatrix(&self, support: &[usize]) -> Result<SymMatrix> {
        if support.is_empty() {
            return Err(invalid("principal submatrix needs a nonempty index set"));
        }
        let mut s = support.to_vec();
        s.sort_unstable();
        for w in s.windows(2) {
            if w[0] == w[1] {
                return Err(invalid(format!("duplicate index {} in index set", w[0])));
            }
        }
        if let Some(&bad) = s.iter().find(|&&i| i >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: self.dim,
            });
        }
        Ok(SymMatrix::from_fn(s.len(), |a, b| self.get(s[a], s[b])).with_psd_flag(self.psd))
    }

    /// Entrywise soft-threshold `sign(A_ij) (|A_ij| - z)_+`, diagonal included.
    pub fn soft_threshold(&self, z: f64) -> Result<SymMatrix> {
        if !(z >= 0.0) {
            return Err(invalid(format!("soft-threshold level must be >= 0, got {z}")));
        }
        Ok(SymMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&a| soft(a, z)).collect(),
            psd: false,
        })
    }

    /// Splits `A = Delta + Psi` into diagonal and off-diagonal parts.
    pub fn diag_offdiag_split(&self) -> (SymMatrix, SymMatrix) {
        let p = self.dim;
        let mut delta = SymMatrix::zeros(p);
        let mut psi = self.clone().with_psd_flag(false);
        for i in 0..p {
            delta.set(i, i, self.get(i, i));
            psi.set(i, i, 0.0);
        }
        (delta, psi)
    }

    /// Simultaneous row/column permutation: `B_ij = A_{perm[i], perm[j]}`.
    pub fn permute(&self, perm: &[usize]) -> Result<SymMatrix> {
        let p = self.dim;
        if perm.len() != p {
            return Err(Error::Dimension("permutation length differs from dimension".into()));
        }
        let mut seen = vec![false; p];
        for &i in perm {
            if i >= p || std::mem::replace(&mut seen[i], true) {
                return Err(invalid("not a permutation"));
            }
        }
        Ok(SymMatrix::from_fn(p, |i, j| self.get(perm[i], perm[j])).with_psd_flag(self.psd))
    }

    /// Smallest eigenvalue bound check used in tests and debug builds:
    /// `lambda_min >= -TOL_PSD * max(1, lambda_max)`.
    pub fn check_psd(&self) -> Result<bool> {
        let eig = symmetric_eigen(self)?;
        let lmax = eig.values[0];
        let lmin = *eig.values.last().unwrap();
        Ok(lmin >= -TOL_PSD * lmax.abs().max(1.0))
    }
}

#[inline]
pub(crate) fn packed_index(p: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < p);
    row_offset(p, i) + (j - i)
}

#[inline]
pub(crate) fn soft(a: f64, z: f64) -> f64 {
    let m = a.abs() - z;
    if m > 0.0 {
        m.copysign(a)
    } else {
        0.0
    }
}

/// `n x p` matrix of observations, one sample per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    data: Vec<f64>,
}

impl DataMatrix {
    pub fn new(n: usize, p: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        if p == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if data.len() != n * p {
            return Err(Error::Dimension(format!(
                "expected {} entries for {n} x {p} data, got {}",
                n * p,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!(
                "data entry ({}, {}) is not finite",
                pos / p,
                pos % p
            )));
        }
        Ok(DataMatrix { n, p, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let p = rows[0].len();
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::Dimension("rows have unequal lengths".into()));
        }
        Self::new(n, p, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.p)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.p + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// CSV with header `x1,...,xp` and 17 significant digits per value.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = (1..=self.p).map(|j| format!("x{j}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|x| crate::fmt_f64(*x)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Empirical covariance `(1/n) sum_i X_i X_i^T`, without centering.
pub fn empirical_covariance(x: &DataMatrix) -> Result<SymMatrix> {
    if x.n == 0 {
        return Err(Error::EmptySample);
    }
    let p = x.p;
    let mut acc = SymMatrix::zeros(p);
    for row in x.rows() {
        let mut start = 0;
        for i in 0..p {
            let xi = row[i];
            let len = p - i;
            if xi != 0.0 {
                let dst = &mut acc.data[start..start + len];
                for (a, &xj) in dst.iter_mut().zip(&row[i..]) {
                    *a += xi * xj;
                }
            }
            start += len;
        }
    }
    let inv_n = 1.0 / x.n as f64;
    acc.data.iter_mut().for_each(|a| *a *= inv_n);
    acc.psd = true;
    debug_assert!(p > 64 || acc.check_psd().unwrap_or(false));
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(p: usize, seed: u64) -> SymMatrix {
        let mut s = seed;
        SymMatrix::from_fn(p, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    #[test]
    fn packed_layout_is_row_contiguous() {
        let p = 5;
        let m = SymMatrix::from_fn(p, |i, j| (10 * i + j) as f64);
        for i in 0..p {
            let row = m.upper_row(i);
            assert_eq!(row.len(), p - i);
            for (off, &x) in row.iter().enumerate() {
                assert_eq!(x, (10 * i + i + off) as f64);
            }
        }
        assert_eq!(m.get(3, 1), m.get(1, 3));
    }

    #[test]
    fn covariance_of_single_row_is_outer_product() {
        let x = DataMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let s = empirical_covariance(&x).unwrap();
        assert_eq!(s.to_dense(), vec![1.0, 0.0, 0.0, 0.0]);
        assert!(s.is_psd_flagged());
    }

    #[test]
    fn covariance_of_two_unit_rows() {
        let x = DataMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = empirical_covariance(&x).unwrap();
        assert_eq!(s.to_dense(), vec![0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn empty_sample_is_rejected() {
        assert_eq!(DataMatrix::new(0, 3, vec![]), Err(Error::EmptySample));
        assert_eq!(DataMatrix::from_rows(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn principal_submatrix_examples() {
        let a = SymMatrix::identity(3);
        assert_eq!(a.principal_submatrix(&[0, 2]).unwrap(), SymMatrix::identity(2));

        let b = SymMatrix::from_dense(3, &[1., 2., 3., 2., 4., 5., 3., 5., 6.], 0.0).unwrap();
        let s = b.principal_submatrix(&[2, 1]).unwrap();
        assert_eq!(s.to_dense(), vec![4., 5., 5., 6.]);

        assert!(matches!(
            b.principal_submatrix(&[0, 3]),
            Err(Error::IndexOutOfRange { index: 3, dim: 3 })
        ));
        assert!(b.principal_submatrix(&[1, 1]).is_err());
        assert!(b.principal_submatrix(&[]).is_err());
    }

    #[test]
    fn principal_submatrix_matches_index_oracle() {
        let a = lcg_matrix(6, 11);
        let s = [0usize, 3, 5];
        let sub = a.principal_submatrix(&s).unwrap();
        for (r, &i) in s.iter().enumerate() {
            for (c, &j) in s.iter().enumerate() {
                assert_eq!(sub.get(r, c), a.get(i, j));
            }
        }
    }

    #[test]
    fn soft_threshold_examples() {
        let a = lcg_matrix(7, 3);
        assert_eq!(a.soft_threshold(0.0).unwrap().packed(), a.packed());
        let i4 = SymMatrix::identity(4);
        assert_eq!(i4.soft_threshold(0.5).unwrap(), SymMatrix::identity(4).scale(0.5).with_psd_flag(false));
        assert!(a.soft_threshold(-0.1).is_err());
        assert!(a.soft_threshold(f64::NAN).is_err());
    }

    #[test]
    fn soft_threshold_splits_over_disjoint_supports() {
        let a = lcg_matrix(8, 99);
        let (d, psi) = a.diag_offdiag_split();
        for &z in &[0.0, 0.1, 0.37, 0.8] {
            let lhs = a.soft_threshold(z).unwrap();
            let rhs = d.soft_threshold(z).unwrap().add(&psi.soft_threshold(z).unwrap()).unwrap();
            for (x, y) in lhs.packed().iter().zip(rhs.packed()) {
                assert!((x - y).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn split_examples() {
        let (d, psi) = SymMatrix::identity(4).diag_offdiag_split();
        assert_eq!(d, SymMatrix::identity(4).with_psd_flag(false));
        assert_eq!(psi.max_abs(), 0.0);

        let a = SymMatrix::from_dense(2, &[1., 2., 2., 3.], 0.0).unwrap();
        let (d, psi) = a.diag_offdiag_split();
        assert_eq!(d.to_dense(), vec![1., 0., 0., 3.]);
        assert_eq!(psi.to_dense(), vec![0., 2., 2., 0.]);
    }

    #[test]
    fn split_recomposes_bit_identically() {
        let a = lcg_matrix(10, 5);
        let (d, psi) = a.diag_offdiag_split();
        let back = d.add(&psi).unwrap();
        for (x, y) in back.packed().iter().zip(a.packed()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn from_dense_rejects_asymmetry() {
        assert!(SymMatrix::from_dense(2, &[1., 2., 2.1, 1.], 1e-12).is_err());
        assert!(SymMatrix::from_dense(2, &[1., 2., 2., 1.], 1e-12).is_ok());
    }

    #[test]
    fn matvec_agrees_with_dense() {
        let a = lcg_matrix(9, 17);
        let dense = a.to_dense();
        let x: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut y = vec![0.0; 9];
        a.matvec(&x, &mut y);
        for i in 0..9 {
            let expect: f64 = (0..9).map(|j| dense[i * 9 + j] * x[j]).sum();
            assert!((expect - y[i]).abs() < 1e-14);
        }
    }
}
