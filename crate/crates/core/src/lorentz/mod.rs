//! Matrix models of `so(n,1)` and `SO_e(n,1)` and the hyperboloid model of
//! hyperbolic `n`-space.
//!
//! The Lorentz form is `J = diag(1, ..., 1, -1)` with the timelike coordinate
//! last, so an algebra element has the block form
//!
//! ```text
//! X = | A   b |      A ∈ so(n), b ∈ R^n
//!     | bᵀ  0 |
//! ```
//!
//! and the Cartan decomposition `so(n,1) = k₀ ⊕ s₀` splits `X` into its `A`
//! and `b` parts.

mod geometry;
mod random;

pub use geometry::{
    dist, geodesic_point, is_exp_s, is_in_k0a0, log_geodesic, pair_isometry, plane_reduction,
    rotation_in_plane, signed_distance_to_geodesic, transvection_to, SpatialPlane,
};
pub use random::{
    random_boost, random_group_element, random_k0, random_rotation, random_unit, trial_rng,
    TrialRng,
};

use std::ops::Mul;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `⟨x, y⟩_J = x₁y₁ + ... + x_n y_n - x_{n+1} y_{n+1}`.
pub fn lorentz_inner(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let n = x.len() - 1;
    x.rows(0, n).dot(&y.rows(0, n)) - x[n] * y[n]
}

/// `J = diag(I_n, -1)`.
pub fn lorentz_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(n + 1, n + 1);
    j[(n, n)] = -1.0;
    j
}

/// Dimension of `so(n,1)`.
pub fn algebra_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Element `(A, b)` of `so(n,1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl AlgebraElement {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let n = b.len();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, b has length {n}",
                a.nrows(),
                a.ncols()
            )));
        }
        let skew = (&a + a.transpose()).amax();
        if skew > 1e-10 * a.amax().max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "A is not skew-symmetric ({skew:e})"
            )));
        }
        Ok(AlgebraElement { a, b })
    }

    pub fn zero(n: usize) -> Self {
        AlgebraElement {
            a: DMatrix::zeros(n, n),
            b: DVector::zeros(n),
        }
    }

    /// Element of `s₀` (`A = 0`).
    pub fn boost(b: DVector<f64>) -> Self {
        let n = b.len();
        AlgebraElement {
            a: DMatrix::zeros(n, n),
            b,
        }
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn is_boost(&self) -> bool {
        self.a.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        AlgebraElement {
            a: &self.a * s,
            b: &self.b * s,
        }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a);
        for i in 0..n {
            m[(i, n)] = self.b[i];
            m[(n, i)] = self.b[i];
        }
        m
    }

    /// Reads `(A, b)` off an `(n+1)×(n+1)` matrix in `so(n,1)`.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() < 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows() - 1;
        let j = lorentz_form(n);
        let defect = (m.transpose() * &j + &j * m).amax();
        if defect > 1e-9 * m.amax().max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "matrix not in so(n,1) ({defect:e})"
            )));
        }
        let a = m.view((0, 0), (n, n)).into_owned();
        let b = DVector::from_fn(n, |i, _| 0.5 * (m[(i, n)] + m[(n, i)]));
        Ok(AlgebraElement {
            a: 0.5 * (&a - a.transpose()),
            b,
        })
    }

    /// Coordinates `(A_ij for i < j in row-major order, b)` in `R^{n(n+1)/2}`.
    pub fn coords(&self) -> DVector<f64> {
        let n = self.n();
        let mut v = DVector::zeros(algebra_dim(n));
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                v[k] = self.a[(i, j)];
                k += 1;
            }
        }
        v.rows_mut(k, n).copy_from(&self.b);
        v
    }

    pub fn from_coords(n: usize, v: &DVector<f64>) -> Result<Self> {
        if v.len() != algebra_dim(n) {
            return Err(Error::AmbientMismatch(algebra_dim(n), v.len()));
        }
        let mut a = DMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                a[(i, j)] = v[k];
                a[(j, i)] = -v[k];
                k += 1;
            }
        }
        Ok(AlgebraElement {
            a,
            b: v.rows(k, n).into_owned(),
        })
    }
}

/// Element of `SO_e(n,1)` as an `(n+1)×(n+1)` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    m: DMatrix<f64>,
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        GroupElement {
            m: DMatrix::identity(n + 1, n + 1),
        }
    }

    /// Wraps `m` after checking `MᵀJM = J`, `det M = 1` and `M_{n+1,n+1} ≥ 1`
    /// within `tol` (relative to `|M|²`).
    pub fn from_matrix(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() < 3 {
            return Err(Error::DimensionMismatch(format!(
                "expected (n+1)x(n+1) with n >= 2, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let g = GroupElement { m };
        if !g.satisfies_invariants(tol) {
            return Err(Error::InvalidConfig(format!(
                "matrix is not in SO_e(n,1) (Lorentz defect {:e})",
                g.lorentz_defect()
            )));
        }
        Ok(g)
    }

    pub fn from_matrix_unchecked(m: DMatrix<f64>) -> Self {
        GroupElement { m }
    }

    /// `diag(R, 1)` for `R ∈ SO(n)`.
    pub fn rotation(r: &DMatrix<f64>) -> Self {
        let n = r.nrows();
        let mut m = DMatrix::identity(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(r);
        GroupElement { m }
    }

    pub fn n(&self) -> usize {
        self.m.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// Upper-left `n×n` block.
    pub fn spatial_block(&self) -> DMatrix<f64> {
        let n = self.n();
        self.m.view((0, 0), (n, n)).into_owned()
    }

    /// `J Mᵀ J`, the exact inverse on `O(n,1)`.
    pub fn inverse(&self) -> Self {
        let n = self.n();
        let mut m = self.m.transpose();
        for i in 0..n {
            m[(i, n)] = -m[(i, n)];
            m[(n, i)] = -m[(n, i)];
        }
        GroupElement { m }
    }

    /// Cartan involution `θ(g) = (gᵀ)⁻¹ = J g J`.
    pub fn cartan_involution(&self) -> Self {
        let n = self.n();
        let mut m = self.m.clone();
        for i in 0..n {
            m[(i, n)] = -m[(i, n)];
            m[(n, i)] = -m[(n, i)];
        }
        GroupElement { m }
    }

    pub fn act(&self, p: &HPoint) -> HPoint {
        HPoint { x: &self.m * &p.x }
    }

    /// `max |MᵀJM - J|`, scaled by `max(1, |M|²)`.
    pub fn lorentz_defect(&self) -> f64 {
        let j = lorentz_form(self.n());
        let scale = self.m.amax().max(1.0);
        (self.m.transpose() * &j * &self.m - j).amax() / (scale * scale)
    }

    pub fn satisfies_invariants(&self, tol: f64) -> bool {
        let n = self.n();
        let det_ok = (self.m.determinant() - 1.0).abs() <= tol * self.m.amax().max(1.0).powi(2);
        self.lorentz_defect() <= tol && det_ok && self.m[(n, n)] >= 1.0 - tol
    }

    /// Frobenius distance between matrices.
    pub fn distance(&self, other: &GroupElement) -> f64 {
        (&self.m - &other.m).norm()
    }

    /// Whether `g·z₀ = z₀` within `tol`.
    pub fn fixes_origin(&self, tol: f64) -> bool {
        let n = self.n();
        let col = self.m.column(n);
        (0..n).all(|i| col[i].abs() <= tol) && (col[n] - 1.0).abs() <= tol
    }
}

impl Mul for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: &GroupElement) -> GroupElement {
        GroupElement {
            m: &self.m * &rhs.m,
        }
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        &self * &rhs
    }
}

/// `sinh(x)/x`.
pub(crate) fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// Closed form of `exp(X_b)`:
/// `I + (sinh β/β) X + ((cosh β - 1)/β²) X²`, `β = |b|`.
pub fn exp_boost(b: &DVector<f64>) -> GroupElement {
    let n = b.len();
    let beta = b.norm();
    let s = sinhc(beta);
    let half = sinhc(0.5 * beta);
    // (cosh β - 1)/β² = sinhc(β/2)² / 2
    let c2 = 0.5 * half * half;
    let mut m = DMatrix::identity(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] += c2 * b[i] * b[j];
        }
        m[(i, n)] = s * b[i];
        m[(n, i)] = s * b[i];
    }
    m[(n, n)] += c2 * beta * beta;
    GroupElement { m }
}

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant.
pub fn exp_pade(x: &AlgebraElement) -> GroupElement {
    GroupElement {
        m: x.to_matrix().exp(),
    }
}

/// `exp: so(n,1) → SO_e(n,1)`; pure boosts use the closed form.
pub fn exp_alg(x: &AlgebraElement) -> GroupElement {
    if x.is_boost() {
        exp_boost(&x.b)
    } else {
        exp_pade(x)
    }
}

/// Point of the hyperboloid `{⟨x,x⟩_J = -1, x_{n+1} > 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HPoint {
    x: DVector<f64>,
}

impl HPoint {
    /// `z₀ = (0, ..., 0, 1)`.
    pub fn origin(n: usize) -> Self {
        let mut x = DVector::zeros(n + 1);
        x[n] = 1.0;
        HPoint { x }
    }

    pub fn new(x: DVector<f64>, tol: f64) -> Result<Self> {
        if x.len() < 3 {
            return Err(Error::DimensionMismatch(format!(
                "hyperboloid point needs n >= 2, got {} coordinates",
                x.len()
            )));
        }
        let p = HPoint { x };
        let n = p.n();
        if p.lorentz_defect() > tol || p.x[n] <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "not on the upper hyperboloid (defect {:e})",
                p.lorentz_defect()
            )));
        }
        Ok(p)
    }

    pub fn new_unchecked(x: DVector<f64>) -> Self {
        HPoint { x }
    }

    /// The point with spatial part `v`.
    pub fn from_spatial(v: &DVector<f64>) -> Self {
        let n = v.len();
        let mut x = DVector::zeros(n + 1);
        x.rows_mut(0, n).copy_from(v);
        x[n] = (1.0 + v.norm_squared()).sqrt();
        HPoint { x }
    }

    pub fn n(&self) -> usize {
        self.x.len() - 1
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn spatial(&self) -> DVector<f64> {
        self.x.rows(0, self.n()).into_owned()
    }

    /// `|⟨x,x⟩_J + 1|` relative to `|x|²`.
    pub fn lorentz_defect(&self) -> f64 {
        (lorentz_inner(&self.x, &self.x) + 1.0).abs() / self.x.norm_squared().max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Truncated Taylor series, an oracle for the exponential.
    fn exp_series(m: &DMatrix<f64>) -> DMatrix<f64> {
        let s = 8;
        let scaled = m / f64::from(1 << s);
        let mut term = DMatrix::identity(m.nrows(), m.ncols());
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * &scaled / k as f64;
            sum += &term;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn exp_zero_is_identity() {
        assert_eq!(exp_alg(&AlgebraElement::zero(3)), GroupElement::identity(3));
    }

    #[test]
    fn boost_closed_form_entries() {
        let t = 0.7;
        let g = exp_boost(&DVector::from_vec(vec![0.0, t]));
        let m = g.matrix();
        assert_relative_eq!(m[(1, 1)], t.cosh(), epsilon = 1e-15);
        assert_relative_eq!(m[(1, 2)], t.sinh(), epsilon = 1e-15);
        assert_relative_eq!(m[(2, 1)], t.sinh(), epsilon = 1e-15);
        assert_relative_eq!(m[(2, 2)], t.cosh(), epsilon = 1e-15);
        assert_relative_eq!(m[(0, 0)], 1.0, epsilon = 1e-15);
        let x = AlgebraElement::boost(DVector::from_vec(vec![0.0, t]));
        assert!((exp_series(&x.to_matrix()) - m).amax() < 1e-12);
    }

    #[test]
    fn boost_closed_form_matches_pade() {
        for b in [
            vec![0.3, -1.2, 0.5],
            vec![1e-9, 0.0, 2e-9],
            vec![2.0, 1.0, -2.5],
        ] {
            let x = AlgebraElement::boost(DVector::from_vec(b));
            let d = exp_boost(&x.b).distance(&exp_pade(&x));
            assert!(d < 1e-12 * exp_boost(&x.b).matrix().amax(), "{d:e}");
        }
    }

    #[test]
    fn general_exp_is_lorentz() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 0.4, -1.0, -0.4, 0.0, 0.3, 1.0, -0.3, 0.0]);
        let x = AlgebraElement::new(a, DVector::from_vec(vec![0.2, -0.5, 0.9])).unwrap();
        let g = exp_alg(&x);
        assert!(g.satisfies_invariants(1e-12));
        assert!((exp_series(&x.to_matrix()) - g.matrix()).amax() < 1e-12);
    }

    #[test]
    fn matrix_round_trip_and_coords() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, -1.0, 0.0, 3.0, -2.0, -3.0, 0.0]);
        let x = AlgebraElement::new(a, DVector::from_vec(vec![4.0, 5.0, 6.0])).unwrap();
        assert_eq!(x.coords().as_slice(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(AlgebraElement::from_coords(3, &x.coords()).unwrap(), x);
        assert_eq!(AlgebraElement::from_matrix(&x.to_matrix()).unwrap(), x);
        let j = lorentz_form(3);
        let m = x.to_matrix();
        assert!((m.transpose() * &j + &j * &m).amax() == 0.0);
    }

    #[test]
    fn non_skew_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(AlgebraElement::new(a, DVector::zeros(2)).is_err());
    }

    #[test]
    fn inverse_and_involution() {
        let x = AlgebraElement::boost(DVector::from_vec(vec![0.3, 0.8]));
        let g = exp_alg(&x);
        let id = &g * &g.inverse();
        assert!(id.distance(&GroupElement::identity(2)) < 1e-14);
        // θ inverts exp s₀
        assert!(g.cartan_involution().distance(&g.inverse()) < 1e-15);
        let r = DMatrix::from_row_slice(2, 2, &[0.6, -0.8, 0.8, 0.6]);
        let k = GroupElement::rotation(&r);
        assert_eq!(k.cartan_involution(), k);
    }

    #[test]
    fn from_matrix_checks_invariants() {
        assert!(GroupElement::from_matrix(DMatrix::identity(3, 3), 1e-12).is_ok());
        let mut m = DMatrix::identity(3, 3);
        m[(2, 2)] = -1.0;
        m[(1, 1)] = -1.0;
        assert!(GroupElement::from_matrix(m, 1e-12).is_err());
        assert!(GroupElement::from_matrix(DMatrix::identity(2, 2), 1e-12).is_err());
    }

    #[test]
    fn hpoint_invariants() {
        let p = HPoint::from_spatial(&DVector::from_vec(vec![0.5, -2.0]));
        assert!(p.lorentz_defect() < 1e-15);
        assert!(HPoint::new(p.coords().clone(), 1e-12).is_ok());
        assert!(HPoint::new(DVector::from_vec(vec![0.0, 0.0, -1.0]), 1e-12).is_err());
    }
}
