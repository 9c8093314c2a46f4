//! Small dense linear algebra: Cholesky factorization, SPD solves, Jacobi
//! eigenvalues, Haar-distributed orthogonal matrices and exact maximum
//! subdeterminants.
//!
//! Matrices are stored row-major. Everything here targets the tens-of-rows
//! matrices that appear in follower problems, so no blocking or pivoting
//! tricks beyond what correctness needs.

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::fmt;

/// Row-major dense matrix of `f64`.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix data length",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matmul inner dimension",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matvec",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `selfᵀ v`.
    pub fn matvec_transpose(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "transposed matvec",
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        self.diag().iter().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.fract() == 0.0)
    }

    /// First `(i, j)` with `|A_ij - A_ji| > 1e-9 (1 + max|A|)`, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        let tol = 1e-9 * (1.0 + self.max_abs());
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)] == 0.0))
    }

    fn check_symmetric(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                context: "square matrix",
                expected: self.rows,
                found: self.cols,
            });
        }
        match self.asymmetry() {
            Some((i, j)) => Err(Error::NotSymmetric { i, j }),
            None => Ok(()),
        }
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Cholesky factorization `Q = RᵀR` with `R` upper triangular.
#[derive(Debug, Clone)]
pub struct Cholesky {
    r: DenseMatrix,
}

impl Cholesky {
    /// Factors a symmetric matrix, rejecting pivots at or below
    /// `1e-12 · trace(Q)/n`.
    pub fn factor(q: &DenseMatrix) -> Result<Self> {
        q.check_symmetric()?;
        let n = q.rows();
        let scale = if n == 0 { 0.0 } else { q.trace() / n as f64 };
        let threshold = 1e-12 * scale;
        let mut r = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut s = q[(j, j)];
            for k in 0..j {
                s -= r[(k, j)] * r[(k, j)];
            }
            if !(s > threshold) || scale <= 0.0 {
                return Err(Error::NotPositiveDefinite { index: j, pivot: s });
            }
            let rjj = s.sqrt();
            r[(j, j)] = rjj;
            for i in (j + 1)..n {
                let mut s = q[(j, i)];
                for k in 0..j {
                    s -= r[(k, j)] * r[(k, i)];
                }
                r[(j, i)] = s / rjj;
            }
        }
        Ok(Self { r })
    }

    /// Upper triangular factor `R`.
    pub fn factor_r(&self) -> &DenseMatrix {
        &self.r
    }

    pub fn dim(&self) -> usize {
        self.r.rows()
    }

    /// Solves `Rᵀ z = p`, i.e. returns `R^{-ᵀ} p`.
    pub fn solve_rt(&self, p: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut z = vec![0.0; n];
        for i in 0..n {
            let mut s = p[i];
            for k in 0..i {
                s -= self.r[(k, i)] * z[k];
            }
            z[i] = s / self.r[(i, i)];
        }
        z
    }

    /// Solves `R x = z`.
    pub fn solve_r(&self, z: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= self.r[(i, k)] * x[k];
            }
            x[i] = s / self.r[(i, i)];
        }
        x
    }

    /// Solves `Q x = c`.
    pub fn solve(&self, c: &[f64]) -> Result<Vec<f64>> {
        if c.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "SPD solve right-hand side",
                expected: self.dim(),
                found: c.len(),
            });
        }
        Ok(self.solve_r(&self.solve_rt(c)))
    }

    /// Diagonal of `Q⁻¹`.
    pub fn inverse_diag(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                norm2(&self.solve_rt(&e)).powi(2)
            })
            .collect()
    }
}

/// Upper triangular `R` with `Q = RᵀR`.
pub fn cholesky(q: &DenseMatrix) -> Result<DenseMatrix> {
    Cholesky::factor(q).map(|c| c.r)
}

pub fn solve_spd(q: &DenseMatrix, c: &[f64]) -> Result<Vec<f64>> {
    Cholesky::factor(q)?.solve(c)
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// All eigenvalues of a symmetric matrix, descending, via cyclic Jacobi.
pub fn symmetric_eigenvalues(q: &DenseMatrix) -> Result<Vec<f64>> {
    q.check_symmetric()?;
    let n = q.rows();
    let mut a = q.clone();
    // symmetrize exactly so rotations act on a truly symmetric matrix
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
    let scale = a.data.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-12 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = c * akp - s * akr;
                    a[(k, r)] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = c * apk - s * ark;
                    a[(r, k)] = s * apk + c * ark;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }
    let mut eig = a.diag();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

/// `(λ_max, λ_min)` of a symmetric matrix.
pub fn eigen_extremes(q: &DenseMatrix) -> Result<(f64, f64)> {
    let eig = symmetric_eigenvalues(q)?;
    match (eig.first(), eig.last()) {
        (Some(&hi), Some(&lo)) => Ok((hi, lo)),
        _ => Err(Error::InvalidArgument("empty matrix has no eigenvalues".into())),
    }
}

/// Householder QR of a square matrix: returns `(Q, R)` with `A = Q R`.
pub fn householder_qr(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let n = a.rows();
    let mut r = a.clone();
    let mut q = DenseMatrix::identity(n);
    for k in 0..n.saturating_sub(1) {
        let norm = (k..n).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[(k, k)] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2 = dot(&v, &v);
        if vnorm2 == 0.0 {
            continue;
        }
        // R <- H R
        for j in 0..n {
            let s: f64 = (k..n).map(|i| v[i - k] * r[(i, j)]).sum::<f64>() * 2.0 / vnorm2;
            for i in k..n {
                r[(i, j)] -= s * v[i - k];
            }
        }
        // Q <- Q H
        for i in 0..n {
            let s: f64 = (k..n).map(|j| q[(i, j)] * v[j - k]).sum::<f64>() * 2.0 / vnorm2;
            for j in k..n {
                q[(i, j)] -= s * v[j - k];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            r[(i, j)] = 0.0;
        }
    }
    (q, r)
}

/// Haar-distributed random orthogonal matrix: QR of a Gaussian matrix with
/// each column of `Q` multiplied by the sign of the matching diagonal of `R`.
pub fn haar_orthogonal(n: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_orthogonal_with(n, &mut rng)
}

pub fn haar_orthogonal_with<G: rand::Rng + ?Sized>(n: usize, rng: &mut G) -> DenseMatrix {
    let data: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(rng)).collect();
    let g = DenseMatrix { rows: n, cols: n, data };
    let (mut q, r) = householder_qr(&g);
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

const SUBDET_DIM_LIMIT: usize = 8;

/// Exact determinant of a square integer matrix (fraction-free Bareiss).
pub fn int_determinant(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Δ(D): largest `|det|` over all square submatrices of an integral matrix.
pub fn max_abs_subdeterminant(d: &DenseMatrix) -> Result<u128> {
    let kmax = d.rows().min(d.cols());
    if kmax > SUBDET_DIM_LIMIT {
        return Err(Error::DimensionTooLarge {
            dim: kmax,
            limit: SUBDET_DIM_LIMIT,
        });
    }
    if !d.is_integral() || !d.is_finite() {
        return Err(Error::InvalidArgument("subdeterminants need an integral matrix".into()));
    }
    let mut best = 0u128;
    for k in 1..=kmax {
        let row_sets = combinations(d.rows(), k);
        let col_sets = combinations(d.cols(), k);
        for rs in &row_sets {
            for cs in &col_sets {
                let minor: Vec<Vec<i128>> = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| d[(i, j)] as i128).collect())
                    .collect();
                best = best.max(int_determinant(&minor).unsigned_abs());
            }
        }
    }
    Ok(best)
}

/// δ(D): largest absolute entry.
pub fn max_abs_entry(d: &DenseMatrix) -> f64 {
    d.max_abs()
}
