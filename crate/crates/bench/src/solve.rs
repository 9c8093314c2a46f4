//! Runs a solver over every manifest entry and writes one results row each.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use bilevel_core::exact::{solve_exact_lin_run, solve_exact_quad_run};
use bilevel_core::instances::parse_instance;
use bilevel_core::{relaxed_foresight_lin, relaxed_foresight_quad, BilevelInstance, BilevelSolution, ExactConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::manifest::{digest, instance_path, read_manifest, ManifestRow};

/// Bumped whenever a results column changes.
pub const RESULTS_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Exact,
    Approx,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Approx => "approx",
        }
    }
}

/// One solved instance. Times are wall-clock seconds around the solver call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub schema: u32,
    pub id: String,
    pub family: String,
    pub q_kind: String,
    pub n_y: usize,
    pub sense: String,
    pub mode: String,
    /// `optimal`, `incumbent_timeout`, `infeasible` or `error`.
    pub status: String,
    pub time_s: Option<f64>,
    pub frv_time_s: Option<f64>,
    pub follower_time_s: Option<f64>,
    pub f_leader: Option<f64>,
    pub f_follower: Option<f64>,
    pub x: String,
    pub y: String,
    pub ex_ante: Option<f64>,
    pub ex_post: Option<f64>,
    pub linear_case: Option<f64>,
    pub best_bound: Option<f64>,
    pub error: String,
}

impl ResultRow {
    fn blank(row: &ManifestRow, mode: Mode) -> Self {
        Self {
            schema: RESULTS_SCHEMA,
            id: row.id.clone(),
            family: row.family.clone(),
            q_kind: row.q_kind.clone(),
            n_y: row.n_y,
            sense: row.sense.clone(),
            mode: mode.as_str().into(),
            status: "error".into(),
            time_s: None,
            frv_time_s: None,
            follower_time_s: None,
            f_leader: None,
            f_follower: None,
            x: String::new(),
            y: String::new(),
            ex_ante: None,
            ex_post: None,
            linear_case: None,
            best_bound: None,
            error: String::new(),
        }
    }

    fn fill(&mut self, sol: &BilevelSolution) {
        self.status = sol.status.to_string();
        self.f_leader = Some(sol.leader_obj);
        self.f_follower = Some(sol.follower_obj);
        self.x = join(&sol.x);
        self.y = join(&sol.y);
    }

    pub fn is_error(&self) -> bool {
        self.status == "error"
    }

    /// Objective columns only; timings vary between runs.
    pub fn objective_key(&self) -> (String, String, Option<f64>, Option<f64>, String, String) {
        (
            self.id.clone(),
            self.status.clone(),
            self.f_leader,
            self.f_follower,
            self.x.clone(),
            self.y.clone(),
        )
    }

    fn rounded(&self) -> Self {
        let ms = |t: Option<f64>| t.map(|v| (v * 1e3).round() / 1e3);
        Self {
            time_s: ms(self.time_s),
            frv_time_s: ms(self.frv_time_s),
            follower_time_s: ms(self.follower_time_s),
            ..self.clone()
        }
    }
}

fn join(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn load(manifest: &Path, row: &ManifestRow) -> Result<BilevelInstance> {
    let path = instance_path(manifest, row);
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let got = digest(text.as_bytes());
    if got != row.sha256 {
        bail!("digest mismatch for {}: manifest {}, file {got}", path.display(), row.sha256);
    }
    let file = parse_instance(&text).with_context(|| format!("parsing {}", path.display()))?;
    if file.id != row.id {
        bail!("file {} holds id `{}`, manifest says `{}`", path.display(), file.id, row.id);
    }
    Ok(file.instance)
}

fn run_one(manifest: &Path, row: &ManifestRow, mode: Mode, time_limit: f64) -> Result<ResultRow> {
    let inst = load(manifest, row)?;
    let mut out = ResultRow::blank(row, mode);
    let cfg = ExactConfig {
        time_limit,
        ..ExactConfig::default()
    };
    match mode {
        Mode::Exact => {
            let run = match &inst {
                BilevelInstance::Quad(q) => solve_exact_quad_run(q, cfg)?,
                BilevelInstance::Lin(l) => solve_exact_lin_run(l, cfg)?,
            };
            out.fill(&run.solution);
            out.time_s = Some(run.seconds);
        }
        Mode::Approx => {
            let res = match &inst {
                BilevelInstance::Quad(q) => relaxed_foresight_quad(q)?,
                BilevelInstance::Lin(l) => relaxed_foresight_lin(l)?,
            };
            out.fill(&res.solution);
            out.time_s = Some(res.total_seconds());
            out.frv_time_s = Some(res.frv_seconds);
            out.follower_time_s = Some(res.follower_seconds);
            let cert = &res.certificate;
            if let BilevelInstance::Quad(_) = inst {
                out.ex_ante = Some(cert.ex_ante);
                out.ex_post = Some(cert.ex_post);
                out.linear_case = cert.linear_case;
            }
            out.best_bound = Some(cert.best());
        }
    }
    Ok(out)
}

/// Solves every manifest entry with `workers` threads (`0` = all cores).
/// Rows come back sorted by id; a failing instance yields an `error` row.
pub fn solve_manifest(manifest: &Path, mode: Mode, time_limit: f64, workers: usize) -> Result<Vec<ResultRow>> {
    if !(time_limit > 0.0) {
        bail!("time limit must be positive, got {time_limit}");
    }
    let entries = read_manifest(manifest)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| anyhow!("building worker pool: {e}"))?;
    let mut rows: Vec<ResultRow> = pool.install(|| {
        entries
            .par_iter()
            .map(|row| {
                run_one(manifest, row, mode, time_limit).unwrap_or_else(|e| {
                    let mut r = ResultRow::blank(row, mode);
                    r.error = format!("{e:#}");
                    r
                })
            })
            .collect()
    });
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(rows)
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row.rounded())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let rows: Vec<ResultRow> = r
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("parsing {}", path.display()))?;
    if let Some(bad) = rows.iter().find(|r| r.schema != RESULTS_SCHEMA) {
        bail!("{}: schema {} (expected {RESULTS_SCHEMA})", path.display(), bad.schema);
    }
    Ok(rows)
}

/// `solve_manifest` followed by `write_results`.
pub fn cmd_solve(
    mode: Mode,
    manifest: &Path,
    time_limit: f64,
    workers: usize,
    out: &Path,
) -> Result<Vec<ResultRow>> {
    let rows = solve_manifest(manifest, mode, time_limit, workers)?;
    write_results(out, &rows)?;
    Ok(rows)
}
