//! Pure-integer LP by depth-first branch-and-bound over simplex relaxations.

use super::simplex::{solve_lp, LpSolution};
use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// `matrix · y ≤ rhs` with `lower ≤ y ≤ upper` (all finite).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearSystem {
    pub(crate) fn check(&self, n: usize) -> Result<()> {
        let dims = [
            ("constraint columns", self.matrix.cols()),
            ("lower bounds", self.lower.len()),
            ("upper bounds", self.upper.len()),
        ];
        for (context, found) in dims {
            if found != n {
                return Err(Error::DimensionMismatch {
                    context,
                    expected: n,
                    found,
                });
            }
        }
        if self.rhs.len() != self.matrix.rows() {
            return Err(Error::DimensionMismatch {
                context: "constraint rhs",
                expected: self.matrix.rows(),
                found: self.rhs.len(),
            });
        }
        if self
            .lower
            .iter()
            .chain(&self.upper)
            .chain(&self.rhs)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidArgument("bounds and rhs must be finite".into()));
        }
        Ok(())
    }

    pub fn is_satisfied(&self, y: &[f64], tol: f64) -> bool {
        (0..self.matrix.rows()).all(|i| dot(self.matrix.row(i), y) <= self.rhs[i] + tol)
            && y
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IlpSolution {
    pub y: Vec<i64>,
    pub value: f64,
    /// Branch-and-bound nodes solved.
    pub nodes: usize,
}

const MAX_INTEGER_DIM: usize = 24;
const INT_TOL: f64 = 1e-7;

/// Global integer optimum by branch-and-bound (most-fractional branching,
/// depth-first, pruning against the incumbent).
pub fn solve_ilp(objective: &[f64], direction: Direction, system: &LinearSystem) -> Result<IlpSolution> {
    let n = objective.len();
    if n > MAX_INTEGER_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            limit: MAX_INTEGER_DIM,
        });
    }
    system.check(n)?;
    // integer bounds are the tightest valid ones
    let root = LinearSystem {
        lower: system.lower.iter().map(|v| (v - INT_TOL).ceil()).collect(),
        upper: system.upper.iter().map(|v| (v + INT_TOL).floor()).collect(),
        ..system.clone()
    };
    // maximize internally
    let sign = match direction {
        Direction::Maximize => 1.0,
        Direction::Minimize => -1.0,
    };
    let obj: Vec<f64> = objective.iter().map(|c| sign * c).collect();

    let mut incumbent: Option<(Vec<i64>, f64)> = None;
    let mut nodes = 0usize;
    let mut stack = vec![(root.lower.clone(), root.upper.clone())];
    while let Some((lower, upper)) = stack.pop() {
        let node = LinearSystem {
            lower,
            upper,
            matrix: root.matrix.clone(),
            rhs: root.rhs.clone(),
        };
        nodes += 1;
        let LpSolution { y, value } = match solve_lp(&obj, Direction::Maximize, &node) {
            Ok(s) => s,
            Err(Error::Infeasible) => continue,
            Err(e) => return Err(e),
        };
        if let Some((_, best)) = &incumbent {
            if value <= best + 1e-9 * (1.0 + best.abs()) {
                continue;
            }
        }
        let branch = y
            .iter()
            .enumerate()
            .map(|(j, v)| (j, (v - v.round()).abs()))
            .filter(|(_, f)| *f > INT_TOL)
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        match branch {
            None => {
                let yi: Vec<i64> = y.iter().map(|v| v.round() as i64).collect();
                let yf: Vec<f64> = yi.iter().map(|&v| v as f64).collect();
                if root.is_satisfied(&yf, 1e-6) {
                    let val = dot(&obj, &yf);
                    let better = incumbent.as_ref().is_none_or(|(_, b)| val > *b);
                    if better {
                        incumbent = Some((yi, val));
                    }
                }
            }
            Some((j, _)) => {
                let v = y[j];
                let mut down_upper = node.upper.clone();
                down_upper[j] = v.floor();
                let mut up_lower = node.lower.clone();
                up_lower[j] = v.ceil();
                let down = (node.lower.clone(), down_upper);
                let up = (up_lower, node.upper.clone());
                // explore the nearer side first
                if v - v.floor() >= 0.5 {
                    stack.push(down);
                    stack.push(up);
                } else {
                    stack.push(up);
                    stack.push(down);
                }
            }
        }
    }
    let (y, val) = incumbent.ok_or(Error::Infeasible)?;
    Ok(IlpSolution {
        y,
        value: sign * val,
        nodes,
    })
}
