use thiserror::Error;

/// Errors raised by the solvers, bound formulas and instance I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("matrix is not symmetric: |Q[{i}][{j}] - Q[{j}][{i}]| exceeds tolerance")]
    NotSymmetric { i: usize, j: usize },
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("Jacobi eigenvalue iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension {dim} exceeds the supported limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("problem is infeasible")]
    Infeasible,
    #[error("certified integer search region is too large ({detail})")]
    SearchRegionOverflow { detail: String },
    #[error("matrix is not diagonal")]
    NotDiagonal,
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("R = {0} is not a subset sum of q")]
    RNotRepresentable(u64),
    #[error("reduction too large: {0}")]
    TooLarge(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
