//! Plain-text matrix format: first line `p`, then `p` lines of `p`
//! whitespace-separated decimals.

use super::SymMatrix;
use crate::error::{Error, Result};

/// Largest accepted `|A_ij - A_ji|` when reading a matrix.
pub const ASYMMETRY_TOL: f64 = 1e-12;

pub fn parse_matrix_text(text: &str) -> Result<SymMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, first) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing dimension line".into(),
    })?;
    let p: usize = first.parse().map_err(|_| Error::Parse {
        line: line_no,
        msg: format!("expected a positive integer dimension, got {first:?}"),
    })?;
    if p == 0 {
        return Err(Error::Parse {
            line: line_no,
            msg: "dimension must be at least 1".into(),
        });
    }
    let mut dense = Vec::with_capacity(p * p);
    for row in 0..p {
        let (line_no, l) = lines.next().ok_or(Error::Parse {
            line: line_no + row + 1,
            msg: format!("expected {p} rows, found {row}"),
        })?;
        let before = dense.len();
        for tok in l.split_whitespace() {
            let x: f64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("not a number: {tok:?}"),
            })?;
            if !x.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("non-finite entry {tok:?}"),
                });
            }
            dense.push(x);
        }
        if dense.len() - before != p {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {p} values, found {}", dense.len() - before),
            });
        }
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::Parse {
            line: line_no,
            msg: "trailing data after matrix rows".into(),
        });
    }
    SymMatrix::from_dense(p, &dense, ASYMMETRY_TOL)
}

pub fn write_matrix_text(a: &SymMatrix) -> String {
    let p = a.dim();
    let mut out = format!("{p}\n");
    for i in 0..p {
        let row: Vec<String> = (0..p).map(|j| crate::fmt_f64(a.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_small_matrix() {
        let a = parse_matrix_text("2\n2 1\n1 2\n").unwrap();
        assert_eq!(a.to_dense(), vec![2., 1., 1., 2.]);
    }

    #[test]
    fn round_trips_exactly() {
        let a = SymMatrix::from_fn(4, |i, j| (i as f64 + 1.0).ln() / (j as f64 + 3.0) + 1e-17);
        let back = parse_matrix_text(&write_matrix_text(&a)).unwrap();
        assert_eq!(a.packed(), back.packed());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_matrix_text("").is_err());
        assert!(parse_matrix_text("2\n1 0\n").is_err());
        assert!(parse_matrix_text("2\n1 0 0\n0 1\n").is_err());
        assert!(parse_matrix_text("2\n1 0.5\n0.5000001 1\n").is_err());
        assert!(parse_matrix_text("2\n1 x\nx 1\n").is_err());
        assert!(parse_matrix_text("1\n1\n1\n").is_err());
    }
}
