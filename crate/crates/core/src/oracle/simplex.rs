//! Bounded LP via a dense two-phase tableau simplex with Bland's rule.
//!
//! Problems have the shape `opt objᵀy` s.t. `D y ≤ rhs`, `lo ≤ y ≤ hi` with
//! finite bounds. Shifting `y = lo + t` gives `0 ≤ t ≤ hi − lo`; upper bounds
//! become explicit rows, so every instance is bounded and the simplex only
//! has to detect infeasibility.

use super::ilp::{Direction, LinearSystem};
use crate::error::{Error, Result};
use crate::linalg::dot;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// Optimal basic solution.
    pub y: Vec<f64>,
    pub value: f64,
}

struct Tableau {
    /// `rows × (cols + 1)`, last column holds the right-hand side.
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    fn rhs(&self, r: usize) -> f64 {
        self.a[r][self.cols]
    }

    /// Minimizes `costᵀz` over the current tableau, never letting a column
    /// with `allowed[j] == false` enter. Bland's rule throughout.
    fn minimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<()> {
        let rows = self.a.len();
        let max_iter = 50_000;
        for _ in 0..max_iter {
            // reduced costs c_j - c_Bᵀ B⁻¹ a_j
            let entering = (0..self.cols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let mut rc = cost[j];
                for r in 0..rows {
                    rc -= cost[self.basis[r]] * self.a[r][j];
                }
                rc < -EPS
            });
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..rows {
                let arc = self.a[r][c];
                if arc > EPS {
                    let ratio = self.rhs(r) / arc;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - EPS
                                || (ratio <= lratio + EPS && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(Error::InvalidArgument("LP is unbounded".into())),
            }
        }
        Err(Error::InvalidArgument("simplex iteration limit reached".into()))
    }
}

/// Solves a bounded LP. Returns an optimal vertex.
pub fn solve_lp(objective: &[f64], direction: Direction, system: &LinearSystem) -> Result<LpSolution> {
    system.check(objective.len())?;
    let n = objective.len();
    let m = system.matrix.rows();
    if system.lower.iter().zip(&system.upper).any(|(l, u)| l > u) {
        return Err(Error::Infeasible);
    }

    // rows: D t ≤ rhs − D lo, then t_j ≤ hi_j − lo_j
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(m + n);
    for i in 0..m {
        let d = system.matrix.row(i);
        rows.push((d.to_vec(), system.rhs[i] - dot(d, &system.lower)));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e, system.upper[j] - system.lower[j]));
    }
    let total_rows = rows.len();
    let negative: Vec<usize> = (0..total_rows).filter(|&i| rows[i].1 < 0.0).collect();
    let n_art = negative.len();
    // columns: t (n) | slacks (total_rows) | artificials (n_art)
    let cols = n + total_rows + n_art;
    let mut a = vec![vec![0.0; cols + 1]; total_rows];
    let mut basis = vec![0; total_rows];
    let mut art_idx = 0;
    for (i, (coef, r)) in rows.iter().enumerate() {
        let sign = if *r < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            a[i][j] = sign * coef[j];
        }
        a[i][n + i] = sign;
        a[i][cols] = sign * r;
        if *r < 0.0 {
            let col = n + total_rows + art_idx;
            a[i][col] = 1.0;
            basis[i] = col;
            art_idx += 1;
        } else {
            basis[i] = n + i;
        }
    }
    let mut tab = Tableau { a, basis, cols };

    if n_art > 0 {
        let mut cost = vec![0.0; cols];
        for c in cost.iter_mut().skip(n + total_rows) {
            *c = 1.0;
        }
        let allowed = vec![true; cols];
        tab.minimize(&cost, &allowed)?;
        let infeas: f64 = (0..total_rows)
            .filter(|&r| tab.basis[r] >= n + total_rows)
            .map(|r| tab.rhs(r))
            .sum();
        let scale = 1.0 + rows.iter().map(|(_, r)| r.abs()).fold(0.0, f64::max);
        if infeas > 1e-7 * scale {
            return Err(Error::Infeasible);
        }
        // drive zero-level artificials out of the basis
        for r in 0..total_rows {
            if tab.basis[r] >= n + total_rows {
                if let Some(c) = (0..n + total_rows).find(|&j| tab.a[r][j].abs() > EPS) {
                    tab.pivot(r, c);
                }
            }
        }
    }

    let sign = match direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };
    let mut cost = vec![0.0; cols];
    for j in 0..n {
        cost[j] = sign * objective[j];
    }
    let allowed: Vec<bool> = (0..cols).map(|j| j < n + total_rows).collect();
    tab.minimize(&cost, &allowed)?;

    let mut y = system.lower.clone();
    for r in 0..total_rows {
        let b = tab.basis[r];
        if b < n {
            y[b] += tab.rhs(r);
        }
    }
    // snap to bounds against round-off
    for j in 0..n {
        y[j] = y[j].clamp(system.lower[j], system.upper[j]);
    }
    let value = dot(objective, &y);
    Ok(LpSolution { y, value })
}
