//! Reference bilevel solvers: enumerate every feasible binary leader decision,
//! solve the follower exactly for each, keep the best leader value.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::foresight::lex_for;
use crate::linalg::dot;
use crate::model::{
    feasible_leaders, to_f64, BilevelSolution, LinBilevelInstance, QuadBilevelInstance, SolveStatus, MAX_LEADER_DIM,
};
use crate::oracle::{solve_ilp, Direction, IqpSolver};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactConfig {
    /// Wall-clock budget in seconds, checked between leader decisions.
    pub time_limit: f64,
    /// Keep the leader value of every evaluated decision.
    pub record_all: bool,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            time_limit: 120.0,
            record_all: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactRun {
    pub solution: BilevelSolution,
    /// Number of leader decisions whose follower problem was solved.
    pub evaluated: usize,
    /// `(x, leader value)` per evaluated decision when `record_all` is set.
    pub leader_values: Vec<(Vec<i64>, f64)>,
    pub seconds: f64,
}

struct Enumerator {
    cfg: ExactConfig,
    start: Instant,
    best: Option<BilevelSolution>,
    evaluated: usize,
    leader_values: Vec<(Vec<i64>, f64)>,
    timed_out: bool,
}

impl Enumerator {
    fn new(cfg: ExactConfig) -> Result<Self> {
        if !(cfg.time_limit > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time limit must be positive, got {}",
                cfg.time_limit
            )));
        }
        Ok(Self {
            cfg,
            start: Instant::now(),
            best: None,
            evaluated: 0,
            leader_values: Vec::new(),
            timed_out: false,
        })
    }

    /// False once the budget is spent (after at least one evaluation).
    fn keep_going(&mut self) -> bool {
        let limit = Duration::from_secs_f64(self.cfg.time_limit.min(1e9));
        if self.evaluated > 0 && self.start.elapsed() > limit {
            self.timed_out = true;
        }
        !self.timed_out
    }

    fn offer(&mut self, cand: BilevelSolution) {
        self.evaluated += 1;
        if self.cfg.record_all {
            self.leader_values.push((cand.x.clone(), cand.leader_obj));
        }
        // enumeration is lexicographic, so only strict improvements replace
        let better = self.best.as_ref().is_none_or(|b| {
            cand.leader_obj < b.leader_obj - 1e-9 * (1.0 + b.leader_obj.abs())
        });
        if better {
            self.best = Some(cand);
        }
    }

    fn finish(self) -> Result<ExactRun> {
        let mut solution = self.best.ok_or(Error::Infeasible)?;
        solution.status = if self.timed_out {
            SolveStatus::IncumbentTimeout
        } else {
            SolveStatus::Optimal
        };
        Ok(ExactRun {
            solution,
            evaluated: self.evaluated,
            leader_values: self.leader_values,
            seconds: self.start.elapsed().as_secs_f64(),
        })
    }
}

fn check_leader_dim(n_x: usize) -> Result<()> {
    if n_x > MAX_LEADER_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n_x,
            limit: MAX_LEADER_DIM,
        });
    }
    Ok(())
}

pub fn solve_exact_quad(inst: &QuadBilevelInstance, cfg: ExactConfig) -> Result<BilevelSolution> {
    Ok(solve_exact_quad_run(inst, cfg)?.solution)
}

pub fn solve_exact_quad_run(inst: &QuadBilevelInstance, cfg: ExactConfig) -> Result<ExactRun> {
    let solver = IqpSolver::new(&inst.q_y)?;
    solve_exact_quad_with(inst, &solver, cfg)
}

/// [`solve_exact_quad_run`] reusing a solver built for `inst.q_y`.
pub fn solve_exact_quad_with(inst: &QuadBilevelInstance, solver: &IqpSolver, cfg: ExactConfig) -> Result<ExactRun> {
    check_leader_dim(inst.n_x())?;
    let lex = lex_for(inst.sense, &inst.d_x);
    let mut en = Enumerator::new(cfg)?;
    for x in feasible_leaders(&inst.a, &inst.b, inst.n_x()) {
        if !en.keep_going() {
            break;
        }
        let c = inst.follower_linear_term(&x)?;
        let resp = solver.minimize_lex(&c, &lex)?;
        let leader_obj = dot(&inst.h_x, &x) + dot(&inst.d_x, &to_f64(&resp.v));
        en.offer(BilevelSolution {
            x: x.iter().map(|v| *v as i64).collect(),
            y: resp.v,
            leader_obj,
            follower_obj: resp.f_int,
            status: SolveStatus::Optimal,
        });
    }
    en.finish()
}

pub fn solve_exact_lin(inst: &LinBilevelInstance, cfg: ExactConfig) -> Result<BilevelSolution> {
    Ok(solve_exact_lin_run(inst, cfg)?.solution)
}

pub fn solve_exact_lin_run(inst: &LinBilevelInstance, cfg: ExactConfig) -> Result<ExactRun> {
    check_leader_dim(inst.n_x())?;
    let mut en = Enumerator::new(cfg)?;
    for x in feasible_leaders(&inst.a, &inst.b, inst.n_x()) {
        if !en.keep_going() {
            break;
        }
        let ilp = match solve_ilp(&inst.d, Direction::Maximize, &inst.follower_system(&x)?) {
            Ok(s) => s,
            // no follower response: the decision is not bilevel feasible
            Err(Error::Infeasible) => continue,
            Err(e) => return Err(e),
        };
        en.offer(BilevelSolution {
            x: x.iter().map(|v| *v as i64).collect(),
            leader_obj: dot(&inst.h_x, &x) + ilp.value,
            follower_obj: ilp.value,
            y: ilp.y,
            status: SolveStatus::Optimal,
        });
    }
    en.finish()
}
