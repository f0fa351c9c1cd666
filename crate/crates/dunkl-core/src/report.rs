//! Report formatting for sweep output: the fixed-header CSV, the JSON
//! summary keyed by cell, and the small regression helpers the summary and
//! the acceptance suite share.

use crate::hardy::{envelope_exponents, HardyReport, StripSpec};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Fixed CSV header; column order is part of the output contract.
pub const CSV_HEADER: &str = "cell,p,sigma,r,rho,S1,S2,total,env1,env2,flags";

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.17e}")
    }
}

fn flags_string(report: &HardyReport) -> String {
    let f = &report.flags;
    let mut parts = Vec::new();
    parts.push(if f.in_strip { "in-strip" } else { "probe" });
    if f.expected_negative {
        parts.push("expected-negative");
    }
    if f.divergent {
        parts.push("divergent");
    } else if f.finite {
        parts.push("finite");
    }
    if f.in_strip && !f.divergent {
        parts.push(if f.split_consistent {
            "split-ok"
        } else {
            "split-bad"
        });
    }
    if report.error.is_some() {
        parts.push("error");
    }
    parts.join(";")
}

/// Render the sweep reports as CSV with the fixed header. Deterministic
/// bytes for a given report list.
pub fn to_csv(reports: &[HardyReport]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        // seed is folded into the cell key so the fixed column set stays
        let _ = writeln!(
            out,
            "{}#s{},{},{},{},{},{},{},{},{},{},{}",
            r.cell,
            r.seed,
            fmt_num(r.p),
            fmt_num(r.sigma),
            fmt_num(r.r),
            fmt_num(r.rho),
            fmt_num(r.s1),
            fmt_num(r.s2),
            fmt_num(r.total),
            fmt_num(r.env1),
            fmt_num(r.env2),
            flags_string(r)
        );
    }
    out
}

/// Least-squares slope of `y` against `x`; `None` for fewer than 2 points.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Slope of `log |value|` against `log x`, ignoring nonpositive entries.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    least_squares_slope(&logs)
}

/// Per-sigma regression outcome for one cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaRegression {
    pub sigma: f64,
    /// Fitted r-exponent of S1 after dividing out the rho-envelope factor.
    pub s1_r_slope: Option<f64>,
    pub s2_r_slope: Option<f64>,
}

/// Summary of one cell across the sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellSummary {
    pub p: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Sup of the Hardy functional over all in-strip reports.
    pub sup: f64,
    /// Max over the full radius grid vs. the grid shrunk by one dyadic
    /// level on each side, per sigma; the largest such ratio.
    pub plateau_ratio: f64,
    /// Expected envelope r-exponents.
    pub expected_s1_r: f64,
    pub expected_s2_r: f64,
    /// Median fitted exponents over the sigma grid (probe-grade seeds).
    pub s1_r_slope_median: f64,
    pub s2_r_slope_median: f64,
    pub regressions: Vec<SigmaRegression>,
    /// Divergence probes: (sigma, measured slope, expected slope).
    pub divergence_probes: Vec<(f64, f64, f64)>,
    pub all_finite: bool,
    pub all_split_consistent: bool,
    pub errors: usize,
}

/// Aggregate sweep reports into per-cell summaries.
pub fn summarize(reports: &[HardyReport], strips: &BTreeMap<String, StripSpec>) -> BTreeMap<String, CellSummary> {
    let mut cells: BTreeMap<String, Vec<&HardyReport>> = BTreeMap::new();
    for r in reports {
        cells.entry(r.cell.clone()).or_default().push(r);
    }
    let mut out = BTreeMap::new();
    for (cell, rows) in cells {
        let strip = match strips.get(&cell) {
            Some(s) => *s,
            None => continue,
        };
        let n = strip.n_moment;
        let in_strip: Vec<&&HardyReport> = rows.iter().filter(|r| r.flags.in_strip).collect();
        let sup = in_strip
            .iter()
            .filter(|r| r.total.is_finite())
            .map(|r| r.total)
            .fold(0.0f64, f64::max);

        // plateau: full grid max vs the grid without its outermost levels
        let mut plateau_ratio = 1.0f64;
        let mut sigmas: Vec<f64> = in_strip.iter().map(|r| r.sigma).collect();
        sigmas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sigmas.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        for &sigma in &sigmas {
            let grid: Vec<&&&HardyReport> = in_strip
                .iter()
                .filter(|r| (r.sigma - sigma).abs() < 1e-12 && r.total.is_finite())
                .collect();
            let max_r = grid.iter().map(|r| r.r).fold(0.0f64, f64::max);
            let full = grid.iter().map(|r| r.total).fold(0.0f64, f64::max);
            let shrunk = grid
                .iter()
                .filter(|r| r.r > 2.0 / max_r.max(2.0) && r.r < max_r / 2.0 * 1.0001)
                .map(|r| r.total)
                .fold(0.0f64, f64::max);
            if shrunk > 0.0 {
                plateau_ratio = plateau_ratio.max(full / shrunk);
            }
        }

        // envelope regressions on probe-grade rows (first active moment N+1)
        let mut regressions = Vec::new();
        for &sigma in &sigmas {
            let probe_rows: Vec<&&&HardyReport> = in_strip
                .iter()
                .filter(|r| {
                    (r.sigma - sigma).abs() < 1e-12
                        && r.first_active_degree == n + 1
                        && r.s1.is_finite()
                        && r.s2.is_finite()
                })
                .collect();
            let e = envelope_exponents(&strip, sigma);
            let s1_pts: Vec<(f64, f64)> = probe_rows
                .iter()
                .filter(|r| r.s1 > 0.0 && r.rho > 0.0)
                .map(|r| (r.r.ln(), (r.s1 / r.rho.powf(e.s1_rho)).ln()))
                .collect();
            let s2_pts: Vec<(f64, f64)> = probe_rows
                .iter()
                .filter(|r| r.s2 > 0.0 && r.rho > 0.0)
                .map(|r| (r.r.ln(), (r.s2 / r.rho.powf(e.s2_rho)).ln()))
                .collect();
            regressions.push(SigmaRegression {
                sigma,
                s1_r_slope: least_squares_slope(&s1_pts),
                s2_r_slope: least_squares_slope(&s2_pts),
            });
        }
        let e_mid = envelope_exponents(&strip, 0.5 * (strip.sigma_min + strip.sigma_max));
        let median = |xs: Vec<f64>| -> f64 {
            let mut v = xs;
            if v.is_empty() {
                return f64::NAN;
            }
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v[v.len() / 2]
        };
        let s1_med = median(regressions.iter().filter_map(|r| r.s1_r_slope).collect());
        let s2_med = median(regressions.iter().filter_map(|r| r.s2_r_slope).collect());

        let divergence_probes = rows
            .iter()
            .filter(|r| r.flags.divergent)
            .filter_map(|r| {
                Some((r.sigma, r.inner_slope?, r.expected_inner_slope?))
            })
            .collect();

        out.insert(
            cell,
            CellSummary {
                p: strip.p,
                sigma_min: strip.sigma_min,
                sigma_max: strip.sigma_max,
                sup,
                plateau_ratio,
                expected_s1_r: e_mid.s1_r,
                expected_s2_r: e_mid.s2_r,
                s1_r_slope_median: s1_med,
                s2_r_slope_median: s2_med,
                regressions,
                divergence_probes,
                all_finite: in_strip.iter().all(|r| r.flags.divergent || r.total.is_finite()),
                all_split_consistent: in_strip
                    .iter()
                    .filter(|r| !r.flags.divergent && r.error.is_none())
                    .all(|r| r.flags.split_consistent),
                errors: rows.iter().filter(|r| r.error.is_some()).count(),
            },
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 * i as f64 - 2.0)).collect();
        assert!((least_squares_slope(&pts).unwrap() - 3.0).abs() < 1e-12);
        assert!(least_squares_slope(&pts[..1]).is_none());
    }

    #[test]
    fn log_slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..20).map(|i| (i as f64, (i as f64).powf(2.5))).collect();
        assert!((log_log_slope(&pts).unwrap() - 2.5).abs() < 1e-10);
    }
}
