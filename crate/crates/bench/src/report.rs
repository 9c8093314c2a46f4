//! Joins exact and approximate results into per-instance records, a timing
//! profile, a Δf histogram and a summary.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::solve::{read_results, ResultRow};
use crate::svg;

/// Reference fractions for Δf = 0, Δf ≤ 5 and Δf ≥ 10 on the 600-instance testbed.
pub const REFERENCE_ZERO: f64 = 0.77;
pub const REFERENCE_LE5: f64 = 0.91;
pub const REFERENCE_GE10: f64 = 0.025;

pub const BOUND_TOL: f64 = 1e-6;
pub const PROFILE_POINTS: usize = 60;

/// The two result files cover different instance ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MismatchedManifests {
    pub only_exact: Vec<String>,
    pub only_approx: Vec<String>,
}

impl fmt::Display for MismatchedManifests {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "result files cover different instances ({} only in exact, {} only in approx",
            self.only_exact.len(),
            self.only_approx.len()
        )?;
        if let Some(id) = self.only_exact.first().or(self.only_approx.first()) {
            write!(f, ", e.g. `{id}`")?;
        }
        f.write_str(")")
    }
}

impl std::error::Error for MismatchedManifests {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub id: String,
    pub q_kind: String,
    pub n_y: usize,
    pub sense: String,
    pub exact_time_s: Option<f64>,
    pub exact_status: String,
    pub approx_frv_time_s: Option<f64>,
    pub approx_follower_time_s: Option<f64>,
    pub f_exact: Option<f64>,
    pub f_approx: Option<f64>,
    pub delta_f: Option<f64>,
    pub ex_ante_bound: Option<f64>,
    pub ex_post_bound: Option<f64>,
    pub bound_satisfied: Option<bool>,
}

impl BenchRecord {
    pub fn approx_time_s(&self) -> Option<f64> {
        Some(self.approx_frv_time_s? + self.approx_follower_time_s?)
    }

    /// Counted in the quality statistics.
    pub fn is_scored(&self) -> bool {
        self.exact_status == "optimal" && self.delta_f.is_some()
    }
}

fn join_record(e: &ResultRow, a: &ResultRow) -> BenchRecord {
    let f_exact = e.f_leader.filter(|_| !e.is_error());
    let f_approx = a.f_leader.filter(|_| !a.is_error());
    let delta_f = f_exact.zip(f_approx).map(|(e, a)| a - e);
    let bound = a.ex_post.or(a.best_bound);
    BenchRecord {
        id: e.id.clone(),
        q_kind: e.q_kind.clone(),
        n_y: e.n_y,
        sense: e.sense.clone(),
        exact_time_s: e.time_s,
        exact_status: e.status.clone(),
        approx_frv_time_s: a.frv_time_s,
        approx_follower_time_s: a.follower_time_s,
        f_exact,
        f_approx,
        delta_f,
        ex_ante_bound: a.ex_ante,
        ex_post_bound: bound,
        bound_satisfied: delta_f.zip(bound).map(|(d, b)| d <= b + BOUND_TOL),
    }
}

/// Pairs rows by id. Errors with [`MismatchedManifests`] unless both sides
/// cover exactly the same ids.
pub fn build_records(exact: &[ResultRow], approx: &[ResultRow]) -> Result<Vec<BenchRecord>> {
    let e: BTreeMap<&str, &ResultRow> = exact.iter().map(|r| (r.id.as_str(), r)).collect();
    let a: BTreeMap<&str, &ResultRow> = approx.iter().map(|r| (r.id.as_str(), r)).collect();
    let only_exact: Vec<String> = e.keys().filter(|k| !a.contains_key(*k)).map(|k| k.to_string()).collect();
    let only_approx: Vec<String> = a.keys().filter(|k| !e.contains_key(*k)).map(|k| k.to_string()).collect();
    if !only_exact.is_empty() || !only_approx.is_empty() || e.len() != exact.len() || a.len() != approx.len() {
        return Err(MismatchedManifests { only_exact, only_approx }.into());
    }
    Ok(e.iter().map(|(id, er)| join_record(er, a[id])).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub budget_s: f64,
    pub exact_fraction: f64,
    pub approx_fraction: f64,
}

/// Fraction of instances each solver finished within each budget. Diagonal
/// instances are left out.
pub fn performance_profile(records: &[BenchRecord], points: usize) -> Vec<ProfilePoint> {
    let timed: Vec<&BenchRecord> = records.iter().filter(|r| r.q_kind != "diagonal").collect();
    if timed.is_empty() {
        return Vec::new();
    }
    let exact: Vec<f64> = timed
        .iter()
        .filter(|r| r.exact_status == "optimal")
        .filter_map(|r| r.exact_time_s)
        .collect();
    let approx: Vec<f64> = timed
        .iter()
        .filter(|r| r.f_approx.is_some())
        .filter_map(|r| r.approx_time_s())
        .collect();
    let all = exact.iter().chain(&approx);
    let lo = all.clone().cloned().filter(|t| *t > 0.0).fold(f64::INFINITY, f64::min).min(1e-3);
    let hi = all.cloned().fold(lo, f64::max);
    let n = timed.len() as f64;
    let frac = |ts: &[f64], b: f64| ts.iter().filter(|&&t| t <= b).count() as f64 / n;
    let steps = points.max(2) - 1;
    (0..=steps)
        .map(|i| {
            let budget = if i == steps {
                hi
            } else {
                lo * (hi / lo).powf(i as f64 / steps as f64)
            };
            ProfilePoint {
                budget_s: budget,
                exact_fraction: frac(&exact, budget),
                approx_fraction: frac(&approx, budget),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub delta_f: i64,
    pub count: usize,
}

/// Counts of Δf rounded to the nearest integer, one bin per integer between
/// the smallest and largest observed value (at least bin 0).
pub fn delta_histogram(records: &[BenchRecord]) -> Vec<HistogramBin> {
    let bins: Vec<i64> = records
        .iter()
        .filter(|r| r.is_scored())
        .map(|r| r.delta_f.unwrap().round() as i64)
        .collect();
    let lo = bins.iter().copied().min().unwrap_or(0).min(0);
    let hi = bins.iter().copied().max().unwrap_or(0).max(0);
    (lo..=hi)
        .map(|b| HistogramBin {
            delta_f: b,
            count: bins.iter().filter(|&&v| v == b).count(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub records: usize,
    /// Instances with exact status optimal and both solves successful.
    pub scored: usize,
    pub frac_zero: f64,
    pub frac_le5: f64,
    pub frac_ge10: f64,
    pub bound_satisfaction: f64,
    /// Scored instances whose Δf is negative beyond 1e-9.
    pub negative: usize,
    /// Scored instances whose Δf is not within 1e-6 of an integer.
    pub non_integral: usize,
    pub max_delta: f64,
    pub errors: usize,
}

pub fn summarize(records: &[BenchRecord]) -> Summary {
    let deltas: Vec<f64> = records.iter().filter(|r| r.is_scored()).filter_map(|r| r.delta_f).collect();
    let n = deltas.len();
    let frac = |pred: &dyn Fn(f64) -> bool| {
        if n == 0 {
            0.0
        } else {
            deltas.iter().filter(|&&d| pred(d)).count() as f64 / n as f64
        }
    };
    let satisfied = records
        .iter()
        .filter(|r| r.is_scored())
        .filter(|r| r.bound_satisfied == Some(true))
        .count();
    Summary {
        records: records.len(),
        scored: n,
        frac_zero: frac(&|d| d.abs() <= BOUND_TOL),
        frac_le5: frac(&|d| d <= 5.0 + BOUND_TOL),
        frac_ge10: frac(&|d| d >= 10.0 - BOUND_TOL),
        bound_satisfaction: if n == 0 { 1.0 } else { satisfied as f64 / n as f64 },
        negative: deltas.iter().filter(|&&d| d < -1e-9).count(),
        non_integral: deltas.iter().filter(|&&d| (d - d.round()).abs() > 1e-6).count(),
        max_delta: deltas.iter().copied().fold(0.0, f64::max),
        errors: records.iter().filter(|r| r.delta_f.is_none()).count(),
    }
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    metric: &'a str,
    value: f64,
    reference: Option<f64>,
}

impl Summary {
    fn lines(&self) -> Vec<SummaryLine<'static>> {
        let line = |metric, value, reference| SummaryLine { metric, value, reference };
        vec![
            line("records", self.records as f64, None),
            line("scored", self.scored as f64, None),
            line("fraction_delta_zero", self.frac_zero, Some(REFERENCE_ZERO)),
            line("fraction_delta_le_5", self.frac_le5, Some(REFERENCE_LE5)),
            line("fraction_delta_ge_10", self.frac_ge10, Some(REFERENCE_GE10)),
            line("bound_satisfaction_rate", self.bound_satisfaction, Some(1.0)),
            line("negative_delta", self.negative as f64, Some(0.0)),
            line("non_integral_delta", self.non_integral as f64, Some(0.0)),
            line("max_delta", self.max_delta, None),
            line("unscored", self.errors as f64, None),
        ]
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.lines() {
            match l.reference {
                Some(r) => writeln!(f, "{:<24} {:>10.4}   (reference {r})", l.metric, l.value)?,
                None => writeln!(f, "{:<24} {:>10.4}", l.metric, l.value)?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub records: Vec<BenchRecord>,
    pub profile: Vec<ProfilePoint>,
    pub histogram: Vec<HistogramBin>,
    pub summary: Summary,
}

pub fn build_report(exact: &[ResultRow], approx: &[ResultRow]) -> Result<Report> {
    let records = build_records(exact, approx)?;
    Ok(Report {
        profile: performance_profile(&records, PROFILE_POINTS),
        histogram: delta_histogram(&records),
        summary: summarize(&records),
        records,
    })
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads both result files and writes `records.csv`, `profile.csv`,
/// `histogram.csv`, `summary.csv`, `profile.svg` and `histogram.svg` into
/// `out_dir`.
pub fn cmd_report(exact_csv: &Path, approx_csv: &Path, out_dir: &Path) -> Result<Report> {
    let report = build_report(&read_results(exact_csv)?, &read_results(approx_csv)?)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    write_csv(&out_dir.join("records.csv"), &report.records)?;
    write_csv(&out_dir.join("profile.csv"), &report.profile)?;
    write_csv(&out_dir.join("histogram.csv"), &report.histogram)?;
    write_csv(&out_dir.join("summary.csv"), &report.summary.lines())?;
    fs::write(out_dir.join("profile.svg"), svg::profile(&report.profile))?;
    fs::write(
        out_dir.join("histogram.svg"),
        svg::histogram(&report.histogram, &report.summary),
    )?;
    Ok(report)
}
