use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix};
use crate::model::{binary_vector, leader_feasible, MAX_LEADER_DIM};

#[derive(Debug, Clone, PartialEq)]
pub struct BinarySolution {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Minimizes `cᵀx` over `x ∈ {0,1}ⁿ` with `A x ≤ b` by enumeration.
///
/// Values within `1e-9 (1 + |best|)` of the incumbent count as ties and the
/// lexicographically smallest bit string wins.
pub fn solve_binary_linear(c: &[f64], a: &DenseMatrix, b: &[f64]) -> Result<BinarySolution> {
    let n = c.len();
    if n > MAX_LEADER_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            limit: MAX_LEADER_DIM,
        });
    }
    if a.cols() != n || a.rows() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "binary LP constraints",
            expected: n,
            found: a.cols(),
        });
    }
    let mut best: Option<BinarySolution> = None;
    for bits in 0..1u64 << n {
        let x = binary_vector(bits, n);
        if !leader_feasible(a, b, &x) {
            continue;
        }
        let value = dot(c, &x);
        let better = match &best {
            None => true,
            Some(inc) => value < inc.value - 1e-9 * (1.0 + inc.value.abs()),
        };
        if better {
            best = Some(BinarySolution { x, value });
        }
    }
    best.ok_or(Error::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_nonnegative_costs_pick_zero() {
        let s = solve_binary_linear(&[1.0, 1.0], &DenseMatrix::zeros(0, 2), &[]).unwrap();
        assert_eq!(s.x, vec![0.0, 0.0]);
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn symmetric_tie_goes_to_lexicographically_smallest() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0]]);
        let s = solve_binary_linear(&[-1.0, -1.0], &a, &[1.0]).unwrap();
        assert_eq!(s.x, vec![0.0, 1.0]);
    }

    #[test]
    fn constraint_forces_zero() {
        let s = solve_binary_linear(&[-5.0], &DenseMatrix::from_rows(&[[1.0]]), &[0.0]).unwrap();
        assert_eq!(s.x, vec![0.0]);
    }

    #[test]
    fn infeasible_and_oversized() {
        let r = solve_binary_linear(&[1.0], &DenseMatrix::from_rows(&[[1.0]]), &[-1.0]);
        assert!(matches!(r, Err(Error::Infeasible)));
        let r = solve_binary_linear(&vec![0.0; 25], &DenseMatrix::zeros(0, 25), &[]);
        assert!(matches!(r, Err(Error::DimensionTooLarge { .. })));
    }
}
