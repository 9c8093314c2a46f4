//! Problem data for the two bilevel families, objective evaluators and
//! structural validation.
//!
//! Leaders are binary: `x ∈ {0,1}^{n_x}` with `A x ≤ b`. Followers are pure
//! integer, either an unconstrained strictly convex quadratic
//! ([`QuadBilevelInstance`]) or a bounded integer linear program whose
//! objective is exactly the follower-dependent part of the leader's cost
//! ([`LinBilevelInstance`]).

use crate::error::{Error, Result};
use crate::linalg::{dot, Cholesky, DenseMatrix};
use crate::oracle::ilp::{solve_ilp, Direction, LinearSystem};
use std::fmt;
use std::str::FromStr;

/// Largest leader dimension the enumeration-based solvers accept.
pub const MAX_LEADER_DIM: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sense {
    Optimistic,
    Pessimistic,
}

impl Sense {
    pub const ALL: [Sense; 2] = [Sense::Optimistic, Sense::Pessimistic];

    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Optimistic => "optimistic",
            Sense::Pessimistic => "pessimistic",
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sense {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "optimistic" => Ok(Sense::Optimistic),
            "pessimistic" => Ok(Sense::Pessimistic),
            other => Err(format!("unknown sense `{other}`")),
        }
    }
}

/// Integer convex-quadratic bilevel program.
///
/// Leader: `min h_xᵀx + d_xᵀy` over binary `x` with `A x ≤ b`.
/// Follower: `min ½ yᵀQ_y y + (C_y x + d_y)ᵀ y` over `y ∈ ℤ^{n_y}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadBilevelInstance {
    pub h_x: Vec<f64>,
    pub d_x: Vec<f64>,
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub q_y: DenseMatrix,
    pub c_y: DenseMatrix,
    pub d_y: Vec<f64>,
    pub sense: Sense,
}

impl QuadBilevelInstance {
    pub fn n_x(&self) -> usize {
        self.h_x.len()
    }

    pub fn n_y(&self) -> usize {
        self.d_x.len()
    }

    pub fn m_x(&self) -> usize {
        self.a.rows()
    }

    /// Linear term `C_y x + d_y` of the follower at leader decision `x`.
    pub fn follower_linear_term(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut c = self.c_y.matvec(x)?;
        for (ci, di) in c.iter_mut().zip(&self.d_y) {
            *ci += di;
        }
        Ok(c)
    }

    pub fn leader_feasible(&self, x: &[f64]) -> bool {
        leader_feasible(&self.a, &self.b, x)
    }
}

/// Integer bilevel program with an integer-linear follower whose objective is
/// misaligned with the leader's.
///
/// Leader: `min h_xᵀx + dᵀy` over binary `x` with `A x ≤ b`.
/// Follower: `max dᵀy` s.t. `C_x x + b_y + D_y y ≤ 0`, `y_lo ≤ y ≤ y_hi`, `y` integral.
#[derive(Debug, Clone, PartialEq)]
pub struct LinBilevelInstance {
    pub h_x: Vec<f64>,
    pub d: Vec<f64>,
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub c_x: DenseMatrix,
    pub b_y: Vec<f64>,
    pub d_y: DenseMatrix,
    pub y_lo: Vec<i64>,
    pub y_hi: Vec<i64>,
    pub sense: Sense,
}

impl LinBilevelInstance {
    pub fn n_x(&self) -> usize {
        self.h_x.len()
    }

    pub fn n_y(&self) -> usize {
        self.d.len()
    }

    /// Number of follower constraint rows (excluding the variable bounds).
    pub fn m_y(&self) -> usize {
        self.d_y.rows()
    }

    /// The follower's feasible region for leader decision `x`:
    /// `D_y y ≤ -(C_x x + b_y)` plus bounds.
    pub fn follower_system(&self, x: &[f64]) -> Result<LinearSystem> {
        let gx = self.c_x.matvec(x)?;
        let rhs = gx.iter().zip(&self.b_y).map(|(g, b)| -(g + b)).collect();
        Ok(LinearSystem {
            matrix: self.d_y.clone(),
            rhs,
            lower: self.y_lo.iter().map(|&v| v as f64).collect(),
            upper: self.y_hi.iter().map(|&v| v as f64).collect(),
        })
    }

    pub fn leader_feasible(&self, x: &[f64]) -> bool {
        leader_feasible(&self.a, &self.b, x)
    }
}

/// Either family, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum BilevelInstance {
    Quad(QuadBilevelInstance),
    Lin(LinBilevelInstance),
}

impl BilevelInstance {
    pub fn sense(&self) -> Sense {
        match self {
            BilevelInstance::Quad(q) => q.sense,
            BilevelInstance::Lin(l) => l.sense,
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        match self {
            BilevelInstance::Quad(q) => validate_quad(q),
            BilevelInstance::Lin(l) => validate_lin(l),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    IncumbentTimeout,
    Infeasible,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::IncumbentTimeout => "incumbent_timeout",
            SolveStatus::Infeasible => "infeasible",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolveStatus {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "optimal" => Ok(SolveStatus::Optimal),
            "incumbent_timeout" => Ok(SolveStatus::IncumbentTimeout),
            "infeasible" => Ok(SolveStatus::Infeasible),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilevelSolution {
    pub x: Vec<i64>,
    pub y: Vec<i64>,
    pub leader_obj: f64,
    pub follower_obj: f64,
    pub status: SolveStatus,
}

/// Continuous and integer follower minimizers for one leader decision.
#[derive(Debug, Clone, PartialEq)]
pub struct FollowerResponse {
    /// Unique continuous minimizer.
    pub u: Vec<f64>,
    /// Selected integer minimizer.
    pub v: Vec<i64>,
    pub f_cont: f64,
    pub f_int: f64,
    /// `‖u − v‖₂`
    pub distance_l2: f64,
}

impl FollowerResponse {
    pub fn new(u: Vec<f64>, v: Vec<i64>, f_cont: f64, f_int: f64) -> Self {
        let distance_l2 = distance_l2(&u, &v);
        Self {
            u,
            v,
            // the computed continuous value can land an ulp above an integral optimum
            f_cont: f_cont.min(f_int),
            f_int,
            distance_l2,
        }
    }
}

pub fn distance_l2(u: &[f64], v: &[i64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, &b)| (a - b as f64).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn to_f64(v: &[i64]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

pub(crate) fn leader_feasible(a: &DenseMatrix, b: &[f64], x: &[f64]) -> bool {
    (0..a.rows()).all(|i| dot(a.row(i), x) <= b[i] + 1e-9)
}

/// Binary vector of length `n` for bit pattern `bits`, with `x₁` as the most
/// significant bit so that increasing `bits` is lexicographic order.
pub fn binary_vector(bits: u64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| ((bits >> (n - 1 - i)) & 1) as f64)
        .collect()
}

fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}

/// `h_xᵀx + d_xᵀy`.
pub fn leader_objective_quad(inst: &QuadBilevelInstance, x: &[f64], y: &[f64]) -> Result<f64> {
    check_len("leader x", inst.n_x(), x.len())?;
    check_len("leader y", inst.n_y(), y.len())?;
    Ok(dot(&inst.h_x, x) + dot(&inst.d_x, y))
}

/// `½ yᵀQ_y y + (C_y x)ᵀy + d_yᵀy`.
pub fn follower_objective_quad(inst: &QuadBilevelInstance, x: &[f64], y: &[f64]) -> Result<f64> {
    check_len("follower x", inst.n_x(), x.len())?;
    check_len("follower y", inst.n_y(), y.len())?;
    let c = inst.follower_linear_term(x)?;
    Ok(quadratic_value(&inst.q_y, &c, y))
}

/// `½ yᵀQ y + cᵀy`.
pub fn quadratic_value(q: &DenseMatrix, c: &[f64], y: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        quad += y[i] * dot(q.row(i), y);
    }
    0.5 * quad + dot(c, y)
}

/// `h_xᵀx + dᵀy`.
pub fn leader_objective_lin(inst: &LinBilevelInstance, x: &[f64], y: &[f64]) -> Result<f64> {
    check_len("leader x", inst.n_x(), x.len())?;
    check_len("leader y", inst.n_y(), y.len())?;
    Ok(dot(&inst.h_x, x) + dot(&inst.d, y))
}

/// `dᵀy` (maximized by the follower).
pub fn follower_objective_lin(inst: &LinBilevelInstance, y: &[f64]) -> Result<f64> {
    check_len("follower y", inst.n_y(), y.len())?;
    Ok(dot(&inst.d, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    DimensionMismatch,
    NonFinite,
    NotSymmetric,
    NotPositiveDefinite,
    NonIntegral,
    InvalidBounds,
    EmptyLeaderRegion,
    FollowerInfeasible,
    TooLarge,
}

/// One broken invariant, naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?} ({})", self.field, self.kind, self.detail)
    }
}

struct Checker(Vec<Violation>);

impl Checker {
    fn push(&mut self, field: &'static str, kind: ViolationKind, detail: impl Into<String>) {
        self.0.push(Violation {
            field,
            kind,
            detail: detail.into(),
        });
    }

    fn len(&mut self, field: &'static str, expected: usize, found: usize) -> bool {
        if expected != found {
            self.push(
                field,
                ViolationKind::DimensionMismatch,
                format!("expected {expected}, found {found}"),
            );
            false
        } else {
            true
        }
    }

    fn finite(&mut self, field: &'static str, v: &[f64]) {
        if v.iter().any(|x| !x.is_finite()) {
            self.push(field, ViolationKind::NonFinite, "non-finite entry");
        }
    }

    fn integral(&mut self, field: &'static str, v: &[f64]) {
        if v.iter().any(|x| x.fract() != 0.0) {
            self.push(field, ViolationKind::NonIntegral, "entry is not an integer");
        }
    }
}

/// Iterates the feasible binary leader decisions in lexicographic order.
pub(crate) fn feasible_leaders<'a>(
    a: &'a DenseMatrix,
    b: &'a [f64],
    n_x: usize,
) -> impl Iterator<Item = Vec<f64>> + 'a {
    (0..1u64 << n_x)
        .map(move |bits| binary_vector(bits, n_x))
        .filter(move |x| leader_feasible(a, b, x))
}

fn check_leader(c: &mut Checker, n_x: usize, a: &DenseMatrix, b: &[f64]) -> bool {
    let ok = c.len("A.cols", n_x, a.cols()) & c.len("b", a.rows(), b.len());
    c.finite("A", a.data());
    c.finite("b", b);
    if !ok {
        return false;
    }
    if n_x > MAX_LEADER_DIM {
        c.push(
            "h_x",
            ViolationKind::TooLarge,
            format!("n_x = {n_x} exceeds {MAX_LEADER_DIM}"),
        );
        return false;
    }
    if feasible_leaders(a, b, n_x).next().is_none() {
        c.push("A", ViolationKind::EmptyLeaderRegion, "no binary x satisfies A x <= b");
        return false;
    }
    true
}

pub fn validate_quad(inst: &QuadBilevelInstance) -> Vec<Violation> {
    let mut c = Checker(Vec::new());
    let (n_x, n_y) = (inst.n_x(), inst.n_y());
    c.finite("h_x", &inst.h_x);
    c.finite("d_x", &inst.d_x);
    c.finite("d_y", &inst.d_y);
    c.finite("Q_y", inst.q_y.data());
    c.finite("C_y", inst.c_y.data());
    let mut dims = c.len("Q_y.rows", n_y, inst.q_y.rows());
    dims &= c.len("Q_y.cols", n_y, inst.q_y.cols());
    dims &= c.len("C_y.rows", n_y, inst.c_y.rows());
    dims &= c.len("C_y.cols", n_x, inst.c_y.cols());
    dims &= c.len("d_y", n_y, inst.d_y.len());
    if dims {
        match Cholesky::factor(&inst.q_y) {
            Ok(_) => {}
            Err(Error::NotSymmetric { i, j }) => {
                c.push("Q_y", ViolationKind::NotSymmetric, format!("entries ({i},{j})"))
            }
            Err(e) => c.push("Q_y", ViolationKind::NotPositiveDefinite, e.to_string()),
        }
    }
    check_leader(&mut c, n_x, &inst.a, &inst.b);
    c.0
}

pub fn validate_lin(inst: &LinBilevelInstance) -> Vec<Violation> {
    let mut c = Checker(Vec::new());
    let (n_x, n_y) = (inst.n_x(), inst.n_y());
    c.finite("h_x", &inst.h_x);
    c.finite("d", &inst.d);
    c.integral("C_x", inst.c_x.data());
    c.integral("b_y", &inst.b_y);
    c.integral("D_y", inst.d_y.data());
    let mut dims = c.len("D_y.cols", n_y, inst.d_y.cols());
    dims &= c.len("C_x.rows", inst.d_y.rows(), inst.c_x.rows());
    dims &= c.len("C_x.cols", n_x, inst.c_x.cols());
    dims &= c.len("b_y", inst.d_y.rows(), inst.b_y.len());
    dims &= c.len("y_lo", n_y, inst.y_lo.len());
    dims &= c.len("y_hi", n_y, inst.y_hi.len());
    if dims && inst.y_lo.iter().zip(&inst.y_hi).any(|(lo, hi)| lo > hi) {
        c.push("y_lo", ViolationKind::InvalidBounds, "lower bound above upper bound");
        dims = false;
    }
    let leader_ok = check_leader(&mut c, n_x, &inst.a, &inst.b);
    if dims && leader_ok && c.0.is_empty() {
        for x in feasible_leaders(&inst.a, &inst.b, n_x) {
            let feasible = inst
                .follower_system(&x)
                .and_then(|sys| solve_ilp(&inst.d, Direction::Maximize, &sys));
            if feasible.is_err() {
                c.push(
                    "D_y",
                    ViolationKind::FollowerInfeasible,
                    format!("follower infeasible for x = {x:?}"),
                );
                break;
            }
        }
    }
    c.0
}
