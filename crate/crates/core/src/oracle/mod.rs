//! Desk-scale optimization oracles standing in for a commercial MIP solver:
//! binary-LP enumeration, exact integer convex-quadratic minimization with
//! lexicographic tie-breaking, a dense simplex LP solver and a small ILP
//! branch-and-bound.

pub mod binary;
pub mod ilp;
pub mod iqp;
pub mod simplex;

pub use binary::{solve_binary_linear, BinarySolution};
pub use ilp::{solve_ilp, Direction, IlpSolution, LinearSystem};
pub use iqp::{
    minimize_iqp, minimize_iqp_lex, round_diagonal_iqp, round_diagonal_iqp_lex, tie_tolerance,
    IqpOptions, IqpSolver, LexSpec,
};
pub use simplex::{solve_lp, LpSolution};
