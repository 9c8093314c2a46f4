//! Reduction from Subset-Sum-Interval to a pessimistic quadratic bilevel
//! program.
//!
//! Follower variables, in order: `y^p (r)`, `y^d (r)`, `y^o (k)`, `y_s`,
//! `z^p (r)`, `z^d (r)`, `z^o (k)`. Leader variables: `x^p (r)`, `x^d (r)`.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::model::{QuadBilevelInstance, Sense};
use crate::oracle::iqp::MAX_IQP_DIM;

/// Given `q₁..q_k`, `R` and `r`: is there `S ∈ [R, R + 2^r)` that is not a
/// subset sum of `q`?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsiInstance {
    pub q: Vec<u64>,
    pub big_r: u64,
    pub r: u32,
}

impl SsiInstance {
    pub fn new(q: Vec<u64>, big_r: u64, r: u32) -> Result<Self> {
        if q.is_empty() || q.contains(&0) {
            return Err(Error::InvalidArgument("q must be nonempty positive integers".into()));
        }
        if big_r == 0 || r == 0 || r as usize > q.len() {
            return Err(Error::InvalidArgument(format!(
                "need R >= 1 and 1 <= r <= k, got R = {big_r}, r = {r}, k = {}",
                q.len()
            )));
        }
        Ok(Self { q, big_r, r })
    }

    pub fn k(&self) -> usize {
        self.q.len()
    }

    /// `Q = Σ qᵢ`
    pub fn total(&self) -> u64 {
        self.q.iter().sum()
    }

    /// `B = R + 2^r − 1 + rQ`
    pub fn b(&self) -> u64 {
        self.big_r + (1u64 << self.r) - 1 + self.r as u64 * self.total()
    }

    /// `M = (B + Q + 2^r + 1)²`
    pub fn m(&self) -> u64 {
        let base = self.b() + self.total() + (1u64 << self.r) + 1;
        base * base
    }

    pub fn follower_dim(&self) -> usize {
        4 * self.r as usize + 2 * self.k() + 1
    }

    pub fn is_subset_sum(&self, s: u64) -> bool {
        let mut reach = vec![false; s as usize + 1];
        reach[0] = true;
        for &qi in &self.q {
            for t in (qi as usize..=s as usize).rev() {
                reach[t] |= reach[t - qi as usize];
            }
        }
        reach[s as usize]
    }

    /// Answer by direct subset-sum checks over the interval.
    pub fn is_yes(&self) -> bool {
        (self.big_r..self.big_r + (1u64 << self.r)).any(|s| !self.is_subset_sum(s))
    }
}

/// Builds the reduced instance. The follower Hessian is the exact Hessian of
/// the penalized objective: `2M²` on the diagonal from the binary penalties,
/// `2aaᵀ` from the interval term and `2M[[1,−1],[−1,1]]` per `(y, z)` pair.
pub fn reduce_ssi(ssi: &SsiInstance) -> Result<QuadBilevelInstance> {
    if !ssi.is_subset_sum(ssi.big_r) {
        return Err(Error::RNotRepresentable(ssi.big_r));
    }
    let (r, k) = (ssi.r as usize, ssi.k());
    let n = ssi.follower_dim();
    if n > MAX_IQP_DIM {
        return Err(Error::TooLarge(format!(
            "{n} follower variables exceed the limit {MAX_IQP_DIM}"
        )));
    }
    let m = ssi.m() as f64;
    let m2 = m * m;
    // keep every coefficient exactly representable
    if 2.0 * m2 * n as f64 > 2f64.powi(52) {
        return Err(Error::TooLarge(format!("penalty M = {m} is not exactly representable")));
    }
    let (yp, yd, yo, ys) = (0, r, 2 * r, 2 * r + k);
    let (zp, zd) = (ys + 1, ys + 1 + r);
    let big_q = ssi.total() as f64;
    let b = ssi.b() as f64;

    let mut a = vec![0.0; n];
    for i in 0..r {
        a[yp + i] = big_q + (1u64 << i) as f64;
        a[yd + i] = big_q;
    }
    for (i, &qi) in ssi.q.iter().enumerate() {
        a[yo + i] = qi as f64;
    }
    a[ys] = 1.0;

    let mut q = DenseMatrix::zeros(n, n);
    let mut d_y = vec![-m2; n];
    for i in 0..n {
        q[(i, i)] += 2.0 * m2;
        for j in 0..n {
            q[(i, j)] += 2.0 * a[i] * a[j];
        }
        d_y[i] -= 2.0 * b * a[i];
    }
    let n_x = 2 * r;
    let mut c_y = DenseMatrix::zeros(n, n_x);
    for i in 0..r {
        for (x_col, y, z) in [(i, yp + i, zp + i), (r + i, yd + i, zd + i)] {
            q[(y, y)] += 2.0 * m;
            q[(z, z)] += 2.0 * m;
            q[(y, z)] -= 2.0 * m;
            q[(z, y)] -= 2.0 * m;
            c_y[(y, x_col)] = 2.0 * m;
            c_y[(z, x_col)] = -2.0 * m;
        }
    }
    let mut d_x = a.clone();
    d_x[ys] = 0.0;
    for v in d_x.iter_mut().skip(zp) {
        *v = 0.0;
    }
    Ok(QuadBilevelInstance {
        h_x: vec![0.0; n_x],
        d_x,
        a: DenseMatrix::new(1, n_x, vec![1.0; n_x])?,
        b: vec![r as f64],
        q_y: q,
        c_y,
        d_y,
        sense: Sense::Pessimistic,
    })
}

/// Follower objective of the reduction written term by term (constants
/// included), for checking the assembled Hessian.
pub fn ssi_follower_value(ssi: &SsiInstance, x: &[i64], y: &[i64]) -> f64 {
    let (r, k) = (ssi.r as usize, ssi.k());
    let m = ssi.m() as f64;
    let big_q = ssi.total() as f64;
    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    let binary: f64 = yf.iter().map(|v| m * m * (v * v - v)).sum();
    let (yp, yd, yo, ys) = (0, r, 2 * r, 2 * r + k);
    let (zp, zd) = (ys + 1, ys + 1 + r);
    let mut lin = yf[ys] - ssi.b() as f64;
    for i in 0..r {
        lin += (big_q + (1u64 << i) as f64) * yf[yp + i] + big_q * yf[yd + i];
    }
    for (i, &qi) in ssi.q.iter().enumerate() {
        lin += qi as f64 * yf[yo + i];
    }
    let mut pen = 0.0;
    for i in 0..r {
        pen += (x[i] as f64 + yf[yp + i] - yf[zp + i]).powi(2);
        pen += (x[r + i] as f64 + yf[yd + i] - yf[zd + i]).powi(2);
    }
    binary + lin * lin + m * pen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::follower_objective_quad;

    #[test]
    fn constants() {
        let s = SsiInstance::new(vec![1, 3], 1, 1).unwrap();
        assert_eq!(s.total(), 4);
        assert_eq!(s.b(), 6);
        assert_eq!(s.m(), 169);
        assert!(s.is_yes());
        let s = SsiInstance::new(vec![1, 2], 1, 1).unwrap();
        assert_eq!(s.b(), 5);
        assert!(!s.is_yes());
    }

    #[test]
    fn rejects_unrepresentable_r() {
        let s = SsiInstance::new(vec![2, 5], 1, 1).unwrap();
        assert!(matches!(reduce_ssi(&s), Err(Error::RNotRepresentable(1))));
        let s = SsiInstance::new(vec![1; 12], 1, 1).unwrap();
        assert!(matches!(reduce_ssi(&s), Err(Error::TooLarge(_))));
    }

    #[test]
    fn hessian_matches_expanded_objective() {
        let s = SsiInstance::new(vec![1, 3], 1, 1).unwrap();
        let inst = reduce_ssi(&s).unwrap();
        let x = [1i64, 0];
        let xf = [1.0, 0.0];
        let base = [0i64; 9];
        let offset = ssi_follower_value(&s, &x, &base) - follower_objective_quad(&inst, &xf, &[0.0; 9]).unwrap();
        for y in [[1, 0, 1, 0, 1, 0, 1, 0, 0], [0, 1, 0, 1, 1, 1, 0, 1, 1], [2, -1, 0, 0, 0, 3, 0, 0, 1]] {
            let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
            let direct = ssi_follower_value(&s, &x, &y);
            let assembled = follower_objective_quad(&inst, &xf, &yf).unwrap() + offset;
            assert_eq!(direct, assembled, "y = {y:?}");
        }
    }
}
