//! Bilevel programs with a binary leader and an integer follower.
//!
//! The follower either minimizes a strictly convex quadratic over the
//! integers or solves a bounded integer linear program whose objective is
//! misaligned with the leader's. [`foresight`] implements the relaxed
//! foresight heuristic together with proximity-based gap certificates,
//! [`exact`] the enumeration reference solver, and [`instances`] seeded
//! testbeds and file I/O.

pub mod error;
pub mod exact;
pub mod foresight;
pub mod instances;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod proximity;

pub use error::{Error, Result};
pub use exact::{solve_exact_lin, solve_exact_quad, ExactConfig, ExactRun};
pub use foresight::{relaxed_foresight_lin, relaxed_foresight_quad, ApproxResult, GapCertificate};
pub use model::{
    BilevelInstance, BilevelSolution, FollowerResponse, LinBilevelInstance, QuadBilevelInstance, Sense, SolveStatus,
};
