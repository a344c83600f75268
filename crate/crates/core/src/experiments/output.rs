//! CSV, JSON and SVG emitters. Floats in CSV carry 17 significant digits.

use serde::Serialize;
use std::fmt::Write;

use super::figures::{GridPoint, Scaling};
use super::inference::Histogram;
use super::Draw;
use crate::fmt_f64;
use crate::stats::StatKind;

/// Version of the JSON summary layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Envelope for every JSON document the CLI writes.
#[derive(Debug, Clone, Serialize)]
pub struct JsonSummary<C: Serialize, R: Serialize> {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: C,
    pub result: R,
}

impl<C: Serialize, R: Serialize> JsonSummary<C, R> {
    pub fn new(command: impl Into<String>, config: C, result: R) -> Self {
        JsonSummary {
            schema: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config,
            result,
        }
    }
}

/// `trial_id,hypothesis,statistic,value`
pub fn draws_csv(draws: &[Draw]) -> String {
    let mut s = String::from("trial_id,hypothesis,statistic,value\n");
    for d in draws {
        let _ = writeln!(s, "{},H{},{},{}", d.trial, d.hypothesis, d.statistic, fmt_f64(d.value));
    }
    s
}

/// `p,k,n,theta,alpha,eta_star,eta_circ,p_ii,tau`
pub fn grid_csv(points: &[GridPoint]) -> String {
    let mut s = String::from("p,k,n,theta,alpha,eta_star,eta_circ,p_ii,tau\n");
    for g in points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            g.p,
            g.k,
            g.n,
            fmt_f64(g.theta),
            fmt_f64(g.alpha),
            fmt_f64(g.eta_star),
            fmt_f64(g.eta_circ),
            fmt_f64(g.p_ii),
            fmt_f64(g.tau)
        );
    }
    s
}

/// `statistic,hypothesis,bin_lo,bin_hi,count`
pub fn histogram_csv(hists: &[(StatKind, u8, Histogram)]) -> String {
    let mut s = String::from("statistic,hypothesis,bin_lo,bin_hi,count\n");
    for (stat, h, hist) in hists {
        for (b, &c) in hist.counts.iter().enumerate() {
            let lo = hist.lo + b as f64 * hist.width;
            let _ = writeln!(s, "{stat},H{h},{},{},{c}", fmt_f64(lo), fmt_f64(lo + hist.width));
        }
    }
    s
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Line plot of the type II error against `log10(eta)`, one curve per
/// `(p, alpha)`.
pub fn phase_svg(points: &[GridPoint], scaling: Scaling) -> String {
    let (w, h, m) = (640.0, 400.0, 50.0);
    let eta = |g: &GridPoint| match scaling {
        Scaling::Star => g.eta_star,
        Scaling::Circ => g.eta_circ,
    };
    let xs: Vec<f64> = points.iter().map(|g| eta(g).log10()).collect();
    let (mut lo, mut hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !(hi > lo) {
        lo -= 1.0;
        hi += 1.0;
    }
    let px = |x: f64| m + (x - lo) / (hi - lo) * (w - 2.0 * m);
    let py = |y: f64| h - m - y * (h - 2.0 * m);
    let label = match scaling {
        Scaling::Star => "eta* = k log(p/k) / n",
        Scaling::Circ => "eta° = k² log(p/k) / n",
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {} H{} M{m} {} V{}" stroke="black" fill="none"/>"#,
        h - m,
        w - m,
        h - m,
        m
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">log10 {label}</text>"#, w / 2.0, h - 10.0);
    let _ = writeln!(s, r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">type II error</text>"#, h / 2.0, h / 2.0);
    let mut curves: Vec<(usize, f64)> = points.iter().map(|g| (g.p, g.alpha)).collect();
    curves.dedup();
    curves.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    curves.dedup();
    for (c, &(p, alpha)) in curves.iter().enumerate() {
        let mut pts: Vec<(f64, f64)> = points
            .iter()
            .filter(|g| g.p == p && g.alpha == alpha)
            .map(|g| (eta(g).log10(), g.p_ii))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let d: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| format!("{}{:.2} {:.2}", if i == 0 { "M" } else { "L" }, px(x), py(y)))
            .collect();
        let color = PALETTE[c % PALETTE.len()];
        let _ = writeln!(s, r#"<path d="{}" stroke="{color}" fill="none" stroke-width="1.5"/>"#, d.join(" "));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">p={p}, alpha={alpha}</text>"#,
            w - m - 110.0,
            m + 15.0 * c as f64
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_headers_and_precision() {
        let d = [Draw {
            trial: 3,
            hypothesis: 1,
            statistic: StatKind::Mdp,
            value: 0.1,
        }];
        let csv = draws_csv(&d);
        assert!(csv.starts_with("trial_id,hypothesis,statistic,value\n3,H1,mdp,"));
        let v: f64 = csv.trim().rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(v, 0.1);
    }

    #[test]
    fn svg_is_well_formed() {
        let g = GridPoint {
            p: 50,
            k: 7,
            n: 100,
            theta: 1.0,
            alpha: 0.05,
            eta_star: 0.1,
            eta_circ: 0.7,
            p_ii: 0.3,
            tau: 2.0,
        };
        let s = phase_svg(&[g, GridPoint { n: 50, eta_star: 0.2, eta_circ: 1.4, p_ii: 0.8, ..g }], Scaling::Circ);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("p=50"));
    }
}
