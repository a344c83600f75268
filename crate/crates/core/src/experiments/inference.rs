//! Small classical tests used to summarize Monte Carlo output.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{invalid, Result};

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("KS test needs two nonempty samples"));
    }
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Asymptotic two-sample critical value `sqrt(-ln(alpha/2)/2) sqrt((n+m)/(nm))`.
pub fn ks_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}

/// One-sample KS statistic against the standard normal.
pub fn ks_one_sample_normal(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(invalid("KS test needs a nonempty sample"));
    }
    let phi = Normal::standard();
    let s = sorted(x);
    let n = s.len() as f64;
    Ok(s.iter().enumerate().fold(0.0f64, |d, (i, &v)| {
        let f = phi.cdf(v);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    }))
}

/// Welch's t test of `mean(a) > mean(b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchTest {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

pub fn welch_one_sided(a: &[f64], b: &[f64]) -> Result<WelchTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(invalid("Welch test needs at least two draws per sample"));
    }
    let stats = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = x.iter().map(|y| (y - m) * (y - m)).sum::<f64>() / (n - 1.0);
        (n, m, v)
    };
    let (na, ma, va) = stats(a);
    let (nb, mb, vb) = stats(b);
    let (sa, sb) = (va / na, vb / nb);
    let se = (sa + sb).sqrt();
    if se == 0.0 {
        let p_value = if ma > mb { 0.0 } else { 1.0 };
        return Ok(WelchTest {
            t: if ma > mb { f64::INFINITY } else { 0.0 },
            df: na + nb - 2.0,
            p_value,
        });
    }
    let t = (ma - mb) / se;
    let df = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| invalid(e.to_string()))?;
    Ok(WelchTest {
        t,
        df,
        p_value: dist.sf(t),
    })
}

/// Equal-width histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<usize>,
}

/// Freedman-Diaconis bin width `2 IQR n^(-1/3)`, capped at `max_bins` bins.
pub fn histogram(values: &[f64], max_bins: usize) -> Result<Histogram> {
    if values.is_empty() || max_bins == 0 {
        return Err(invalid("histogram needs values and at least one bin"));
    }
    let s = sorted(values);
    let n = s.len();
    let (lo, hi) = (s[0], s[n - 1]);
    let q = |f: f64| s[((f * (n - 1) as f64).round() as usize).min(n - 1)];
    let fd = 2.0 * (q(0.75) - q(0.25)) / (n as f64).cbrt();
    let range = hi - lo;
    let bins = if fd > 0.0 && range > 0.0 {
        ((range / fd).ceil() as usize).clamp(1, max_bins)
    } else {
        1
    };
    let width = if range > 0.0 { range / bins as f64 } else { 1.0 };
    let mut counts = vec![0; bins];
    for &v in &s {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(Histogram { lo, width, counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_identical_and_disjoint() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&a, &[4.0, 5.0]).unwrap(), 1.0);
        assert!((ks_critical_value(100, 100, 0.01) - 1.6276 * 0.02f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn ks_normal_sample() {
        let mut r = crate::rng::Seed::new(1, 0).rng();
        let x: Vec<f64> = (0..5000).map(|_| r.gaussian()).collect();
        assert!(ks_one_sample_normal(&x).unwrap() < 1.63 / (5000f64).sqrt());
        let shifted: Vec<f64> = x.iter().map(|v| v + 0.5).collect();
        assert!(ks_one_sample_normal(&shifted).unwrap() > 0.1);
    }

    #[test]
    fn welch_detects_shift() {
        let a: Vec<f64> = (0..50).map(|i| 1.0 + (i % 7) as f64 * 0.1).collect();
        let b: Vec<f64> = (0..50).map(|i| (i % 5) as f64 * 0.1).collect();
        let w = welch_one_sided(&a, &b).unwrap();
        assert!(w.t > 0.0 && w.p_value < 1e-10);
        assert!(welch_one_sided(&b, &a).unwrap().p_value > 0.99);
    }

    #[test]
    fn histogram_counts_everything() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sqrt()).collect();
        let h = histogram(&v, 64).unwrap();
        assert_eq!(h.counts.iter().sum::<usize>(), 1000);
        assert!(h.counts.len() <= 64);
        assert_eq!(histogram(&[3.0; 10], 64).unwrap().counts, vec![10]);
    }
}
