//! Relaxed Foresight: solve the bilevel problem with the follower's
//! integrality dropped, freeze the resulting leader decision, then let the
//! follower respond optimally over the integers. Each result carries additive
//! gap certificates against the true bilevel optimum.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::{dot, max_abs_entry, max_abs_subdeterminant, norm1, norm2, norm_inf, Cholesky, DenseMatrix};
use crate::model::{
    feasible_leaders, to_f64, BilevelSolution, LinBilevelInstance, QuadBilevelInstance, Sense, SolveStatus,
};
use crate::oracle::{solve_binary_linear, solve_ilp, solve_lp, Direction, IqpSolver, LexSpec};
use crate::proximity::{cook_prox_bound, ew_prox_bound, prox_linear_term_bound, ProximityBounds};

/// Additive bounds on `f^am − f^om`. Quadratic-family results fill `ex_ante`,
/// `ex_post` and `linear_case`; linear-family results fill `lin_l_inf` and
/// `lin_l1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GapCertificate {
    /// Lipschitz constant of the leader's follower term.
    pub l2: f64,
    pub prox_used: f64,
    pub ex_ante: f64,
    pub ex_post: f64,
    pub linear_case: Option<f64>,
    pub lin_l_inf: Option<f64>,
    pub lin_l1: Option<f64>,
}

impl GapCertificate {
    /// Tightest bound this certificate offers.
    pub fn best(&self) -> f64 {
        let candidates = if self.lin_l_inf.is_some() || self.lin_l1.is_some() {
            [self.lin_l_inf, self.lin_l1]
        } else {
            [Some(self.ex_post), self.linear_case]
        };
        candidates.into_iter().flatten().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    pub solution: BilevelSolution,
    pub frv_leader: Vec<i64>,
    pub frv_follower_cont: Vec<f64>,
    /// Leader value of the relaxed problem at its optimum.
    pub frv_value: f64,
    pub certificate: GapCertificate,
    pub frv_seconds: f64,
    pub follower_seconds: f64,
}

impl ApproxResult {
    pub fn total_seconds(&self) -> f64 {
        self.frv_seconds + self.follower_seconds
    }
}

pub(crate) fn lex_for(sense: Sense, secondary: &[f64]) -> LexSpec {
    LexSpec {
        secondary: secondary.to_vec(),
        direction: match sense {
            Sense::Optimistic => Direction::Minimize,
            Sense::Pessimistic => Direction::Maximize,
        },
    }
}

fn as_int(x: &[f64]) -> Vec<i64> {
    x.iter().map(|v| v.round() as i64).collect()
}

pub fn relaxed_foresight_quad(inst: &QuadBilevelInstance) -> Result<ApproxResult> {
    let solver = IqpSolver::new(&inst.q_y)?;
    relaxed_foresight_quad_with(inst, &solver)
}

/// [`relaxed_foresight_quad`] reusing a solver built for `inst.q_y`.
pub fn relaxed_foresight_quad_with(inst: &QuadBilevelInstance, solver: &IqpSolver) -> Result<ApproxResult> {
    let start = Instant::now();
    let chol = Cholesky::factor(&inst.q_y)?;
    // ŷ(x) = −Q⁻¹(C x + d_y), so d_xᵀŷ(x) = −(C ᵀQ⁻¹d_x)ᵀx − d_yᵀQ⁻¹d_x
    let w = chol.solve(&inst.d_x)?;
    let ctw = inst.c_y.matvec_transpose(&w)?;
    let cost: Vec<f64> = inst.h_x.iter().zip(&ctw).map(|(h, t)| h - t).collect();
    let constant = -dot(&inst.d_y, &w);
    let frv = solve_binary_linear(&cost, &inst.a, &inst.b)?;
    let x = frv.x;
    let c = inst.follower_linear_term(&x)?;
    let y_hat: Vec<f64> = chol.solve(&c)?.into_iter().map(|v| -v).collect();
    let frv_value = frv.value + constant;
    let frv_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let resp = solver.minimize_lex(&c, &lex_for(inst.sense, &inst.d_x))?;
    let follower_seconds = start.elapsed().as_secs_f64();

    let bounds = ProximityBounds::for_quadratic(&inst.q_y)?;
    let l2 = norm2(&inst.d_x);
    let linear_case = match certify_linear_case(&inst.q_y, &inst.d_x) {
        Ok(v) => Some(v),
        Err(Error::ZeroVector) => None,
        Err(e) => return Err(e),
    };
    let certificate = GapCertificate {
        l2,
        prox_used: bounds.prox_l2,
        ex_ante: certify_ex_ante(l2, bounds.prox_l2),
        ex_post: certify_ex_post(l2, bounds.prox_l2, resp.distance_l2),
        linear_case,
        lin_l_inf: None,
        lin_l1: None,
    };
    let yf = to_f64(&resp.v);
    let solution = BilevelSolution {
        leader_obj: dot(&inst.h_x, &x) + dot(&inst.d_x, &yf),
        follower_obj: resp.f_int,
        x: as_int(&x),
        y: resp.v,
        status: SolveStatus::Optimal,
    };
    Ok(ApproxResult {
        frv_leader: solution.x.clone(),
        solution,
        frv_follower_cont: y_hat,
        frv_value,
        certificate,
        frv_seconds,
        follower_seconds,
    })
}

/// Misaligned objectives collapse the relaxed bilevel problem to a scan over
/// leader decisions of `h_xᵀx + max{dᵀy : C_x x + b_y + D_y y ≤ 0}`.
pub fn relaxed_foresight_lin(inst: &LinBilevelInstance) -> Result<ApproxResult> {
    let start = Instant::now();
    let mut best: Option<(Vec<f64>, Vec<f64>, f64)> = None;
    for x in feasible_leaders(&inst.a, &inst.b, inst.n_x()) {
        let sys = inst.follower_system(&x)?;
        let lp = match solve_lp(&inst.d, Direction::Maximize, &sys) {
            Ok(lp) => lp,
            Err(Error::Infeasible) => continue,
            Err(e) => return Err(e),
        };
        let value = dot(&inst.h_x, &x) + lp.value;
        let better = best
            .as_ref()
            .is_none_or(|(_, _, b)| value < b - 1e-9 * (1.0 + b.abs()));
        if better {
            best = Some((x, lp.y, value));
        }
    }
    let (x, y_hat, frv_value) = best.ok_or(Error::Infeasible)?;
    let frv_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let ilp = solve_ilp(&inst.d, Direction::Maximize, &inst.follower_system(&x)?)?;
    let follower_seconds = start.elapsed().as_secs_f64();

    let (lin_l_inf, lin_l1) = certify_lin(inst);
    let certificate = GapCertificate {
        l2: norm2(&inst.d),
        lin_l_inf,
        lin_l1,
        ..Default::default()
    };
    let solution = BilevelSolution {
        leader_obj: dot(&inst.h_x, &x) + ilp.value,
        follower_obj: ilp.value,
        x: as_int(&x),
        y: ilp.y,
        status: SolveStatus::Optimal,
    };
    Ok(ApproxResult {
        frv_leader: solution.x.clone(),
        solution,
        frv_follower_cont: y_hat,
        frv_value,
        certificate,
        frv_seconds,
        follower_seconds,
    })
}

/// Lattice-proximity certificates for the follower system including its
/// variable bounds, `[D_y; I; −I]`, for which `Δ = max(Δ(D_y), 1)` and
/// `δ = max(δ(D_y), 1)`. `None` when `Δ(D_y)` is beyond the enumeration guard.
pub fn certify_lin(inst: &LinBilevelInstance) -> (Option<f64>, Option<f64>) {
    let n = inst.n_y();
    let m = inst.m_y() + 2 * n;
    let delta_entry = max_abs_entry(&inst.d_y).max(1.0);
    let l1 = 2.0 * norm_inf(&inst.d) * ew_prox_bound(m, delta_entry);
    let l_inf = max_abs_subdeterminant(&inst.d_y)
        .ok()
        .map(|delta| 2.0 * norm1(&inst.d) * cook_prox_bound(n, delta.max(1)));
    (l_inf, Some(l1))
}

/// `2 L₂ prox`.
pub fn certify_ex_ante(l2: f64, prox: f64) -> f64 {
    2.0 * l2 * prox
}

/// `L₂ (prox + ‖y^am − ŷ^am‖₂)`.
pub fn certify_ex_post(l2: f64, prox: f64, realized: f64) -> f64 {
    l2 * (prox + realized)
}

/// `2 · (Flt(n)√λ_max / (4√2 ‖R⁻ᵀd_x‖)) d_xᵀQ⁻¹d_x`.
pub fn certify_linear_case(q: &DenseMatrix, d_x: &[f64]) -> Result<f64> {
    Ok(2.0 * prox_linear_term_bound(q, d_x)?)
}

/// Bound on the leader value when the relaxed problem is only solved to
/// within `α f^om + β`: `α f^om + β + (α+1) L₂ prox`.
pub fn compose_apx_bound(f_om: f64, alpha: f64, beta: f64, l2: f64, prox: f64) -> Result<f64> {
    if !(alpha >= 1.0) || !(beta >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need alpha >= 1 and beta >= 0, got alpha = {alpha}, beta = {beta}"
        )));
    }
    Ok(alpha * f_om + beta + (alpha + 1.0) * l2 * prox)
}
