//! Proximity between continuous and integer minimizers, and the bound
//! formulas that turn it into approximation certificates.

use crate::error::{Error, Result};
use crate::linalg::{dot, eigen_extremes, max_abs_entry, max_abs_subdeterminant, norm2, Cholesky, DenseMatrix};
use crate::model::quadratic_value;

/// Which bound produced [`ProximityBounds::prox_l2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSource {
    QuadGeneral,
    QuadDiagonal,
    CookLInf,
    EwL1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProximityBounds {
    pub flatness: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub prox_l2: f64,
    pub source: BoundSource,
}

impl ProximityBounds {
    /// Bound for a quadratic follower: `√n/2` for diagonal `Q`, else the
    /// flatness-based bound.
    pub fn for_quadratic(q: &DenseMatrix) -> Result<Self> {
        let n = q.rows();
        let (lambda_max, lambda_min) = eigen_extremes(q)?;
        Cholesky::factor(q)?;
        let (prox_l2, source) = if q.is_diagonal() {
            (prox_diagonal(n), BoundSource::QuadDiagonal)
        } else {
            (prox_bound_quad(q)?, BoundSource::QuadGeneral)
        };
        Ok(Self {
            flatness: flatness_bound(n),
            lambda_max,
            lambda_min,
            prox_l2,
            source,
        })
    }
}

/// `Flt(n) ≤ n^{5/2}`.
pub fn flatness_bound(n: usize) -> f64 {
    (n as f64).powf(2.5)
}

/// Asymptotic `n (log n)^3` flatness shape with unit constant. Informational
/// only: no explicit constant is known, so it is never used in certificates.
pub fn flatness_reis_rothvoss(n: usize) -> f64 {
    let n = n as f64;
    n * n.ln().max(1.0).powi(3)
}

/// `(Flt(n)/4) √(λ_max/λ_min)`.
pub fn prox_bound_quad(q: &DenseMatrix) -> Result<f64> {
    Cholesky::factor(q)?;
    let (lmax, lmin) = eigen_extremes(q)?;
    if lmin <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            index: q.rows().saturating_sub(1),
            pivot: lmin,
        });
    }
    Ok(flatness_bound(q.rows()) / 4.0 * (lmax / lmin).sqrt())
}

/// Exact proximity `√n/2` for diagonal Hessians.
pub fn prox_diagonal(n: usize) -> f64 {
    (n as f64).sqrt() / 2.0
}

/// `max { pᵀx : xᵀQx ≤ γ } = (√γ / ‖R⁻ᵀp‖) pᵀQ⁻¹p`.
pub fn ellipsoid_linear_max(q: &DenseMatrix, p: &[f64], gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidArgument(format!("gamma must be nonnegative, got {gamma}")));
    }
    let chol = Cholesky::factor(q)?;
    check_len(q, p)?;
    let w = chol.solve_rt(p);
    let norm = norm2(&w);
    if norm == 0.0 {
        return Ok(0.0);
    }
    let ptqp = dot(&w, &w);
    Ok(gamma.sqrt() / norm * ptqp)
}

/// `(Flt(n) √λ_max / (4√2 ‖R⁻ᵀp‖)) pᵀQ⁻¹p`.
pub fn prox_linear_term_bound(q: &DenseMatrix, p: &[f64]) -> Result<f64> {
    let chol = Cholesky::factor(q)?;
    check_len(q, p)?;
    if p.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroVector);
    }
    let (lmax, _) = eigen_extremes(q)?;
    let w = chol.solve_rt(p);
    let ptqp = dot(&w, &w);
    Ok(flatness_bound(q.rows()) * lmax.sqrt() / (4.0 * 2f64.sqrt() * norm2(&w)) * ptqp)
}

/// `‖ŷ − ỹ‖_∞ ≤ n Δ(D)`.
pub fn cook_prox_bound(n: usize, delta: u128) -> f64 {
    n as f64 * delta as f64
}

/// `‖ŷ − ỹ‖₁ ≤ m (2mδ + 1)^m`.
pub fn ew_prox_bound(m: usize, delta: f64) -> f64 {
    let mf = m as f64;
    mf * (2.0 * mf * delta + 1.0).powi(m as i32)
}

/// Cook and Eisenbrand–Weismantel bounds for `D y ≤ rhs`.
pub fn linear_bounds(d: &DenseMatrix) -> Result<(ProximityBounds, ProximityBounds)> {
    let delta = max_abs_subdeterminant(d)?;
    let entry = max_abs_entry(d);
    let cook = ProximityBounds {
        flatness: 0.0,
        lambda_max: 0.0,
        lambda_min: 0.0,
        prox_l2: cook_prox_bound(d.cols(), delta),
        source: BoundSource::CookLInf,
    };
    let ew = ProximityBounds {
        prox_l2: ew_prox_bound(d.rows(), entry),
        source: BoundSource::EwL1,
        ..cook.clone()
    };
    Ok((cook, ew))
}

pub const MEASURE_BOX_LIMIT: f64 = 1e5;

/// Largest `‖u − v‖₂` over all integer minimizers `v` of `½yᵀQy + dᵀy`,
/// found by exhausting the certified level-set box, widened to at least
/// `box_radius` around `u`.
pub fn measure_prox_bruteforce(q: &DenseMatrix, d: &[f64], box_radius: i64) -> Result<f64> {
    let chol = Cholesky::factor(q)?;
    check_len(q, d)?;
    let n = q.rows();
    let u: Vec<f64> = chol.solve(d)?.into_iter().map(|v| -v).collect();
    let fu = 0.5 * dot(d, &u);
    let rounded: Vec<f64> = u.iter().map(|v| v.round()).collect();
    let gap = (quadratic_value(q, d, &rounded) - fu).max(0.0);
    let inv = chol.inverse_diag();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    let mut points = 1.0;
    for i in 0..n {
        let w = (2.0 * gap * inv[i]).sqrt() * (1.0 + 1e-9) + 1e-9;
        let w = w.max(box_radius as f64);
        let (l, h) = ((u[i] - w).ceil() as i64, (u[i] + w).floor() as i64);
        points *= (h - l + 1) as f64;
        lo.push(l);
        hi.push(h);
    }
    if points > MEASURE_BOX_LIMIT {
        return Err(Error::SearchRegionOverflow {
            detail: format!("{points} lattice points"),
        });
    }
    let mut cands: Vec<(f64, f64)> = Vec::new();
    let mut y = lo.clone();
    loop {
        let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
        let f = quadratic_value(q, d, &yf);
        let dist = norm2(&yf.iter().zip(&u).map(|(a, b)| a - b).collect::<Vec<_>>());
        cands.push((f, dist));
        let mut i = n;
        loop {
            if i == 0 {
                let f_min = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
                let tol = 1e-9 * (1.0 + f_min.abs());
                return Ok(cands
                    .iter()
                    .filter(|c| c.0 <= f_min + tol)
                    .map(|c| c.1)
                    .fold(0.0, f64::max));
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

fn check_len(q: &DenseMatrix, v: &[f64]) -> Result<()> {
    if v.len() != q.rows() {
        return Err(Error::DimensionMismatch {
            context: "vector length vs matrix",
            expected: q.rows(),
            found: v.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-5
    }

    #[test]
    fn flatness_values() {
        assert_eq!(flatness_bound(1), 1.0);
        assert_eq!(flatness_bound(4), 32.0);
        assert_eq!(flatness_bound(9), 243.0);
    }

    #[test]
    fn quad_bound_values() {
        assert!(close(prox_bound_quad(&DenseMatrix::identity(2)).unwrap(), std::f64::consts::SQRT_2));
        assert!(close(prox_bound_quad(&DenseMatrix::from_diag(&[9.0, 1.0])).unwrap(), 4.24264));
        let measured = measure_prox_bruteforce(&DenseMatrix::identity(2), &[-0.5, -0.5], 0).unwrap();
        assert!((measured - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn diagonal_values() {
        assert_eq!(prox_diagonal(1), 0.5);
        assert_eq!(prox_diagonal(4), 1.0);
        assert_eq!(prox_diagonal(2), 2f64.sqrt() / 2.0);
    }

    #[test]
    fn ellipsoid_values() {
        let i2 = DenseMatrix::identity(2);
        assert!((ellipsoid_linear_max(&i2, &[1.0, 0.0], 4.0).unwrap() - 2.0).abs() < 1e-12);
        let q = DenseMatrix::from_diag(&[4.0, 1.0]);
        assert!((ellipsoid_linear_max(&q, &[1.0, 0.0], 1.0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(ellipsoid_linear_max(&q, &[3.0, -1.0], 0.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_term_values() {
        let b1 = prox_linear_term_bound(&DenseMatrix::identity(1), &[1.0]).unwrap();
        assert!(close(b1, 0.17678));
        let b2 = prox_linear_term_bound(&DenseMatrix::identity(2), &[1.0, 0.0]).unwrap();
        assert!((b2 - 1.0).abs() < 1e-12);
        let q = DenseMatrix::from_rows(&[[3.0, 1.0], [1.0, 2.0]]);
        let a = prox_linear_term_bound(&q, &[1.0, -2.0]).unwrap();
        let b = prox_linear_term_bound(&q, &[3.0, -6.0]).unwrap();
        assert!((b - 3.0 * a).abs() < 1e-10);
        assert!(matches!(prox_linear_term_bound(&q, &[0.0, 0.0]), Err(Error::ZeroVector)));
    }

    #[test]
    fn lattice_bounds() {
        assert_eq!(cook_prox_bound(2, 1), 2.0);
        assert_eq!(cook_prox_bound(3, 2), 6.0);
        assert_eq!(cook_prox_bound(3, 0), 0.0);
        assert_eq!(ew_prox_bound(1, 1.0), 3.0);
        assert_eq!(ew_prox_bound(2, 3.0), 338.0);
        assert_eq!(ew_prox_bound(4, 0.0), 4.0);
    }

    #[test]
    fn measured_examples() {
        assert_eq!(measure_prox_bruteforce(&DenseMatrix::identity(1), &[-0.5], 0).unwrap(), 0.5);
        assert_eq!(measure_prox_bruteforce(&DenseMatrix::identity(3), &[0.0; 3], 1).unwrap(), 0.0);
    }

    #[test]
    fn bounds_struct_picks_diagonal_formula() {
        let b = ProximityBounds::for_quadratic(&DenseMatrix::from_diag(&[2.0, 5.0, 1.0, 1.0])).unwrap();
        assert_eq!(b.source, BoundSource::QuadDiagonal);
        assert_eq!(b.prox_l2, 1.0);
        let b = ProximityBounds::for_quadratic(&DenseMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]])).unwrap();
        assert_eq!(b.source, BoundSource::QuadGeneral);
        assert!((b.lambda_max - 3.0).abs() < 1e-10);
    }
}
