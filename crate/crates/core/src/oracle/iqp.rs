//! Exact unconstrained integer convex-quadratic minimization.
//!
//! For `f(y) = ½ yᵀQy + cᵀy` with `Q ≻ 0` and continuous minimizer
//! `u = −Q⁻¹c`, every integer point obeys `f(y) = f(u) + ½ (y−u)ᵀQ(y−u)`.
//! Any integer minimizer therefore lies in the level set
//! `½ (y−u)ᵀQ(y−u) ≤ f(round(u)) − f(u)`, whose bounding box is
//! `|y_i − u_i| ≤ √(2Δf (Q⁻¹)_ii)`. Small boxes are enumerated directly;
//! otherwise a depth-first branch-and-bound fixes one coordinate per level
//! and bounds each partial assignment by the exact minimum of `f` over the
//! remaining free coordinates (a Schur complement, read off a Cholesky
//! factor of the permuted Hessian). Coordinates are fixed in order of
//! decreasing box width, children in Schnorr–Euchner zig-zag order.
//!
//! The search runs twice: once to find the minimum value with a shrinking
//! radius, and once over the fixed level set `f ≤ f_min + tol` to select
//! among ties.

use super::ilp::Direction;
use crate::error::{Error, Result};
use crate::linalg::{dot, Cholesky, DenseMatrix};
use crate::model::{quadratic_value, FollowerResponse};

/// Secondary objective used to choose among follower optima.
#[derive(Debug, Clone, PartialEq)]
pub struct LexSpec {
    pub secondary: Vec<f64>,
    /// `Maximize` encodes the pessimistic tie-break, `Minimize` the optimistic one.
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IqpOptions {
    /// Enumerate the certified box directly when it has at most this many points.
    pub direct_box_limit: f64,
    /// Give up once branch-and-bound has visited this many nodes.
    pub node_limit: u64,
}

impl Default for IqpOptions {
    fn default() -> Self {
        Self {
            direct_box_limit: 1e5,
            node_limit: 1_000_000_000,
        }
    }
}

pub const MAX_IQP_DIM: usize = 24;

/// Objective values within this distance of the minimum count as ties: exact
/// when `Q` and `c` are integral, `1e-6 (1 + |f|)` otherwise.
pub fn tie_tolerance(integral: bool, f_int: f64) -> f64 {
    if integral {
        0.0
    } else {
        1e-6 * (1.0 + f_int.abs())
    }
}

fn is_integral(v: &[f64]) -> bool {
    v.iter().all(|x| x.fract() == 0.0)
}

/// Reusable IQP solver for a fixed Hessian; the linear term varies per call.
#[derive(Debug, Clone)]
pub struct IqpSolver {
    q: DenseMatrix,
    chol: Cholesky,
    /// `perm[k]` is the original coordinate fixed at level `k`; level `n−1` first.
    perm: Vec<usize>,
    /// Cholesky factor of the permuted Hessian.
    r: DenseMatrix,
    /// `R_kk²`
    rkk2: Vec<f64>,
    /// `R_kl / R_kk` for `l > k`.
    ratios: DenseMatrix,
    inv_diag: Vec<f64>,
    integral_q: bool,
    options: IqpOptions,
}

impl IqpSolver {
    pub fn new(q: &DenseMatrix) -> Result<Self> {
        Self::with_options(q, IqpOptions::default())
    }

    pub fn with_options(q: &DenseMatrix, options: IqpOptions) -> Result<Self> {
        let n = q.rows();
        if n > MAX_IQP_DIM {
            return Err(Error::DimensionTooLarge {
                dim: n,
                limit: MAX_IQP_DIM,
            });
        }
        let chol = Cholesky::factor(q)?;
        let inv_diag = chol.inverse_diag();
        // widest box coordinate sits at the top level (fixed first)
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by(|&a, &b| inv_diag[a].total_cmp(&inv_diag[b]).then(b.cmp(&a)));
        let mut qp = DenseMatrix::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                qp[(k, l)] = q[(perm[k], perm[l])];
            }
        }
        let r = Cholesky::factor(&qp)?.factor_r().clone();
        let rkk2 = (0..n).map(|k| r[(k, k)] * r[(k, k)]).collect();
        let mut ratios = DenseMatrix::zeros(n, n);
        for k in 0..n {
            for l in (k + 1)..n {
                ratios[(k, l)] = r[(k, l)] / r[(k, k)];
            }
        }
        Ok(Self {
            integral_q: q.is_integral(),
            q: q.clone(),
            chol,
            perm,
            r,
            rkk2,
            ratios,
            inv_diag,
            options,
        })
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    pub fn hessian(&self) -> &DenseMatrix {
        &self.q
    }

    /// Continuous minimizer `u = −Q⁻¹c` and `f(u)`.
    pub fn continuous(&self, c: &[f64]) -> Result<(Vec<f64>, f64)> {
        let mut u = self.chol.solve(c)?;
        for v in u.iter_mut() {
            *v = -*v;
        }
        let fu = 0.5 * dot(c, &u);
        Ok((u, fu))
    }

    pub fn value(&self, c: &[f64], y: &[i64]) -> f64 {
        let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
        quadratic_value(&self.q, c, &yf)
    }

    pub fn tie_tolerance(&self, c: &[f64], f_int: f64) -> f64 {
        tie_tolerance(self.integral_q && is_integral(c), f_int)
    }

    /// Global integer minimizer; among ties the lexicographically smallest.
    pub fn minimize(&self, c: &[f64]) -> Result<FollowerResponse> {
        self.solve(c, None)
    }

    /// Global integer minimizer; among ties (within [`tie_tolerance`]) the one
    /// optimizing `lex.secondary` in `lex.direction`, then lexicographically
    /// smallest.
    pub fn minimize_lex(&self, c: &[f64], lex: &LexSpec) -> Result<FollowerResponse> {
        if lex.secondary.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "lexicographic secondary objective",
                expected: self.dim(),
                found: lex.secondary.len(),
            });
        }
        self.solve(c, Some(lex))
    }

    /// All integer minimizers (within the tie tolerance), lexicographically
    /// sorted, stopping after `limit`.
    pub fn optima(&self, c: &[f64], limit: usize) -> Result<Vec<Vec<i64>>> {
        let (u, fu) = self.continuous(c)?;
        let f_min = self.min_value(c, &u, fu)?;
        let threshold = f_min + self.tie_tolerance(c, f_min);
        let mut out = Vec::new();
        self.search(c, &u, fu, threshold, &mut |y, f, _| {
            if f <= threshold && out.len() < limit {
                out.push(y.to_vec());
            }
            None
        })?;
        out.sort();
        Ok(out)
    }

    fn solve(&self, c: &[f64], lex: Option<&LexSpec>) -> Result<FollowerResponse> {
        let (u, fu) = self.continuous(c)?;
        let f_min = self.min_value(c, &u, fu)?;
        let threshold = f_min + self.tie_tolerance(c, f_min);
        let mut best: Option<(Vec<i64>, f64, f64)> = None;
        self.search(c, &u, fu, threshold, &mut |y, f, _| {
            if f > threshold {
                return None;
            }
            let key = lex.map_or(0.0, |l| {
                let s: f64 = l.secondary.iter().zip(y).map(|(a, &b)| a * b as f64).sum();
                match l.direction {
                    Direction::Minimize => s,
                    Direction::Maximize => -s,
                }
            });
            let replace = match &best {
                None => true,
                Some((by, bkey, _)) => {
                    let tol = 1e-9 * (1.0 + key.abs() + bkey.abs());
                    key < bkey - tol || (key <= bkey + tol && y < by.as_slice())
                }
            };
            if replace {
                best = Some((y.to_vec(), key, f));
            }
            None
        })?;
        let (v, _, f_int) = best.ok_or_else(|| Error::SearchRegionOverflow {
            detail: "tie search lost the minimizer".into(),
        })?;
        Ok(FollowerResponse::new(u, v, fu, f_int))
    }

    /// Minimum integer value via a shrinking-radius search.
    fn min_value(&self, c: &[f64], u: &[f64], fu: f64) -> Result<f64> {
        let rounded: Vec<i64> = u.iter().map(|v| v.round() as i64).collect();
        let start = self.value(c, &rounded);
        let mut best = start;
        self.search(c, u, fu, start, &mut |_, f, _| {
            if f < best {
                best = f;
                Some(f)
            } else {
                None
            }
        })?;
        Ok(best)
    }

    /// Visits integer points with `f(y) ≤ threshold` (plus round-off slack).
    /// The visitor may return a smaller threshold to shrink the search.
    fn search(
        &self,
        c: &[f64],
        u: &[f64],
        fu: f64,
        threshold: f64,
        visit: &mut dyn FnMut(&[i64], f64, f64) -> Option<f64>,
    ) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            visit(&[], 0.0, 0.0);
            return Ok(());
        }
        let radius2 = |t: f64| {
            let r2 = (2.0 * (t - fu)).max(0.0);
            r2 + 1e-8 * (1.0 + r2) + 1e-9 * (t.abs() + fu.abs())
        };
        let r2 = radius2(threshold);
        let widths: Vec<f64> = self.inv_diag.iter().map(|d| (r2 * d).sqrt()).collect();
        if widths.iter().any(|w| !w.is_finite() || *w > 1e12) {
            return Err(Error::SearchRegionOverflow {
                detail: format!("box half-widths {widths:?}"),
            });
        }
        let lo: Vec<i64> = (0..n).map(|i| (u[i] - widths[i]).ceil() as i64).collect();
        let hi: Vec<i64> = (0..n).map(|i| (u[i] + widths[i]).floor() as i64).collect();
        let points: f64 = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1).max(0) as f64).product();
        if points <= self.options.direct_box_limit {
            self.enumerate_box(c, &lo, &hi, threshold, visit);
            Ok(())
        } else {
            self.branch_and_bound(c, u, threshold, &radius2, visit)
        }
    }

    fn enumerate_box(
        &self,
        c: &[f64],
        lo: &[i64],
        hi: &[i64],
        threshold: f64,
        visit: &mut dyn FnMut(&[i64], f64, f64) -> Option<f64>,
    ) {
        if lo.iter().zip(hi).any(|(l, h)| l > h) {
            return;
        }
        let mut limit = threshold;
        let mut y = lo.to_vec();
        loop {
            let f = self.value(c, &y);
            if f <= limit {
                if let Some(t) = visit(&y, f, 0.0) {
                    limit = limit.min(t);
                }
            }
            let mut i = y.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if y[i] < hi[i] {
                    y[i] += 1;
                    break;
                }
                y[i] = lo[i];
            }
        }
    }

    fn branch_and_bound(
        &self,
        c: &[f64],
        u: &[f64],
        threshold: f64,
        radius2: &dyn Fn(f64) -> f64,
        visit: &mut dyn FnMut(&[i64], f64, f64) -> Option<f64>,
    ) -> Result<()> {
        let n = self.dim();
        let up: Vec<f64> = self.perm.iter().map(|&i| u[i]).collect();
        let mut r2 = radius2(threshold);
        // permuted assignment, centers, partial distances and zig-zag state
        let mut yp = vec![0i64; n];
        let mut center = vec![0.0; n];
        let mut partial = vec![0.0; n + 1];
        let mut base = vec![0i64; n];
        let mut dir = vec![1i64; n];
        let mut step = vec![0u64; n];
        let mut y = vec![0i64; n];
        let mut nodes: u64 = 0;

        let set_center = |k: usize, yp: &[i64], center: &mut [f64]| {
            let mut s = up[k];
            for l in (k + 1)..n {
                s -= self.ratios[(k, l)] * (yp[l] as f64 - up[l]);
            }
            center[k] = s;
        };
        let start_level =
            |k: usize, center: &[f64], base: &mut [i64], dir: &mut [i64], step: &mut [u64], yp: &mut [i64]| {
                let b = center[k].round();
                base[k] = b as i64;
                dir[k] = if center[k] >= b { 1 } else { -1 };
                step[k] = 0;
                yp[k] = base[k];
            };
        let advance = |k: usize, base: &[i64], dir: &[i64], step: &mut [u64], yp: &mut [i64]| {
            step[k] += 1;
            let t = step[k] as i64;
            yp[k] = if t % 2 == 1 {
                base[k] + dir[k] * (t + 1) / 2
            } else {
                base[k] - dir[k] * t / 2
            };
        };

        let mut k = n - 1;
        set_center(k, &yp, &mut center);
        start_level(k, &center, &mut base, &mut dir, &mut step, &mut yp);
        loop {
            nodes += 1;
            if nodes > self.options.node_limit {
                return Err(Error::SearchRegionOverflow {
                    detail: format!("more than {} branch-and-bound nodes", self.options.node_limit),
                });
            }
            let diff = yp[k] as f64 - center[k];
            let pk = partial[k + 1] + self.rkk2[k] * diff * diff;
            if pk <= r2 {
                if k == 0 {
                    for (level, &orig) in self.perm.iter().enumerate() {
                        y[orig] = yp[level];
                    }
                    let f = self.value(c, &y);
                    if let Some(t) = visit(&y, f, pk) {
                        r2 = r2.min(radius2(t));
                    }
                    advance(k, &base, &dir, &mut step, &mut yp);
                } else {
                    partial[k] = pk;
                    k -= 1;
                    set_center(k, &yp, &mut center);
                    start_level(k, &center, &mut base, &mut dir, &mut step, &mut yp);
                }
            } else {
                // zig-zag order is nondecreasing in |y_k − center_k|
                k += 1;
                if k == n {
                    return Ok(());
                }
                advance(k, &base, &dir, &mut step, &mut yp);
            }
        }
    }

    /// Upper triangular factor of the permuted Hessian (exposed for diagnostics).
    pub fn permuted_factor(&self) -> (&[usize], &DenseMatrix) {
        (&self.perm, &self.r)
    }
}

pub fn minimize_iqp(q: &DenseMatrix, c: &[f64]) -> Result<FollowerResponse> {
    IqpSolver::new(q)?.minimize(c)
}

pub fn minimize_iqp_lex(q: &DenseMatrix, c: &[f64], lex: &LexSpec) -> Result<FollowerResponse> {
    IqpSolver::new(q)?.minimize_lex(c, lex)
}

/// Diagonal Hessian: the integer optimum is the componentwise rounding of `u`.
pub fn round_diagonal_iqp(q: &DenseMatrix, c: &[f64]) -> Result<FollowerResponse> {
    round_diagonal(q, c, None)
}

/// [`round_diagonal_iqp`] with coordinates tied at `.5` resolved by `lex`.
pub fn round_diagonal_iqp_lex(q: &DenseMatrix, c: &[f64], lex: &LexSpec) -> Result<FollowerResponse> {
    round_diagonal(q, c, Some(lex))
}

fn round_diagonal(q: &DenseMatrix, c: &[f64], lex: Option<&LexSpec>) -> Result<FollowerResponse> {
    if !q.is_diagonal() {
        return Err(Error::NotDiagonal);
    }
    let n = q.rows();
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            context: "IQP linear term",
            expected: n,
            found: c.len(),
        });
    }
    if let Some((index, &pivot)) = q.diag().iter().enumerate().find(|(_, d)| !(**d > 0.0)) {
        return Err(Error::NotPositiveDefinite { index, pivot });
    }
    let qd = q.diag();
    let u: Vec<f64> = (0..n).map(|i| -c[i] / qd[i]).collect();
    let term = |i: usize, y: f64| 0.5 * qd[i] * y * y + c[i] * y;
    let mut lows = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (u[i].floor(), u[i].floor() + 1.0);
        let (fa, fb) = (term(i, a), term(i, b));
        lows.push((a, b, fa, fb));
        v.push(if fb < fa { b } else { a });
    }
    let f_int: f64 = (0..n).map(|i| term(i, v[i])).sum();
    let tol = tie_tolerance(q.is_integral() && is_integral(c), f_int);
    for i in 0..n {
        let (a, b, fa, fb) = lows[i];
        if (fa - fb).abs() <= tol {
            let s = lex.map_or(0.0, |l| l.secondary[i]);
            let prefer_upper = match lex.map(|l| l.direction) {
                Some(Direction::Minimize) => s < 0.0,
                Some(Direction::Maximize) => s > 0.0,
                None => false,
            };
            v[i] = if prefer_upper { b } else { a };
        }
    }
    let vi: Vec<i64> = v.iter().map(|&x| x as i64).collect();
    let f_int: f64 = (0..n).map(|i| term(i, v[i])).sum();
    let fu = 0.5 * dot(c, &u);
    Ok(FollowerResponse::new(u, vi, fu, f_int))
}
