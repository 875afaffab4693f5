use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{lorentz_inner, GroupElement, HPoint};
use crate::error::{Error, Result};
use crate::subspace::frame_rotation;

/// Hyperbolic distance `arcosh(-⟨p,q⟩_J)`.
///
/// Evaluated as `2 arsinh(|p - q|_J / 2)`, which is the same quantity on the
/// hyperboloid but keeps full precision for nearby points.
pub fn dist(p: &HPoint, q: &HPoint) -> f64 {
    let diff = p.coords() - q.coords();
    let sq = lorentz_inner(&diff, &diff).max(0.0);
    2.0 * (0.5 * sq.sqrt()).asinh()
}

fn check_unit(u: &DVector<f64>) -> Result<()> {
    let norm = u.norm();
    if (norm - 1.0).abs() > 1e-9 {
        Err(Error::NotUnit(norm))
    } else {
        Ok(())
    }
}

/// `exp(t X_u)·z₀ = (sinh t · u, cosh t)`.
pub fn geodesic_point(u: &DVector<f64>, t: f64) -> Result<HPoint> {
    check_unit(u)?;
    let n = u.len();
    let mut x = DVector::zeros(n + 1);
    x.rows_mut(0, n).copy_from(&(u * t.sinh()));
    x[n] = t.cosh();
    Ok(HPoint::new_unchecked(x))
}

/// Inverse of [`geodesic_point`]: `t = arsinh(u · y_spatial)`.
pub fn log_geodesic(u: &DVector<f64>, y: &HPoint) -> Result<f64> {
    check_unit(u)?;
    let t = u.dot(&y.spatial()).asinh();
    let back = geodesic_point(u, t)?;
    let residual = (back.coords() - y.coords()).norm();
    if residual > 1e-8 * y.coords().norm().max(1.0) {
        return Err(Error::OffGeodesic { residual });
    }
    Ok(t)
}

/// The transvection `exp(t X_u)` carrying `z₀` to `p`:
///
/// ```text
/// | I + v vᵀ/(1 + c)   v |    p = (v, c)
/// | vᵀ                 c |
/// ```
pub fn transvection_to(p: &HPoint) -> GroupElement {
    let n = p.n();
    let v = p.spatial();
    let c = p.coords()[n];
    let mut m = DMatrix::identity(n + 1, n + 1);
    let k = 1.0 / (1.0 + c);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] += k * v[i] * v[j];
        }
        m[(i, n)] = v[i];
        m[(n, i)] = v[i];
    }
    m[(n, n)] = c;
    GroupElement::from_matrix_unchecked(m)
}

/// An oriented 2-plane in `R^n`, spanned by orthonormal `e`, `f`. The
/// totally geodesic `H²` it determines is the hyperboloid cut with
/// `span(e, f, e_{n+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialPlane {
    pub e: DVector<f64>,
    pub f: DVector<f64>,
}

impl SpatialPlane {
    pub fn new(e: DVector<f64>, f: DVector<f64>) -> Result<Self> {
        check_unit(&e)?;
        check_unit(&f)?;
        if e.len() != f.len() {
            return Err(Error::AmbientMismatch(e.len(), f.len()));
        }
        if e.dot(&f).abs() > 1e-9 {
            return Err(Error::InvalidConfig(
                "plane vectors are not orthogonal".into(),
            ));
        }
        Ok(SpatialPlane { e, f })
    }

    /// `span(e_{n-1}, e_n)`, the last two spatial coordinates.
    pub fn standard(n: usize) -> Self {
        assert!(n >= 2, "planes need n >= 2");
        let mut e = DVector::zeros(n);
        let mut f = DVector::zeros(n);
        e[n - 2] = 1.0;
        f[n - 1] = 1.0;
        SpatialPlane { e, f }
    }

    pub fn n(&self) -> usize {
        self.e.len()
    }

    /// Distance of the spatial part of `p` from the plane, relative to `|p|`.
    pub fn offset(&self, p: &HPoint) -> f64 {
        let s = p.spatial();
        let inplane = &self.e * self.e.dot(&s) + &self.f * self.f.dot(&s);
        (s - inplane).norm() / p.coords().norm().max(1.0)
    }

    fn angle_of(&self, v: &DVector<f64>) -> f64 {
        self.f.dot(v).atan2(self.e.dot(v))
    }
}

/// Rotation of `R^n` by `angle` in the plane `(e, f)`, identity on its
/// complement.
pub fn rotation_in_plane(e: &DVector<f64>, f: &DVector<f64>, angle: f64) -> DMatrix<f64> {
    let n = e.len();
    let (s, c) = angle.sin_cos();
    let mut r = DMatrix::identity(n, n);
    r += (e * e.transpose() + f * f.transpose()) * (c - 1.0);
    r += (f * e.transpose() - e * f.transpose()) * s;
    r
}

/// Rotation taking the direction of `a` to the direction of `b`, acting in the
/// given plane or else in `span(a, b)`.
fn rotation_taking(
    a: &DVector<f64>,
    b: &DVector<f64>,
    plane: Option<&SpatialPlane>,
) -> DMatrix<f64> {
    let n = a.len();
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return DMatrix::identity(n, n);
    }
    if let Some(pl) = plane {
        let angle = pl.angle_of(b) - pl.angle_of(a);
        return rotation_in_plane(&pl.e, &pl.f, angle);
    }
    let ah = a / na;
    let bh = b / nb;
    let cos = ah.dot(&bh);
    let w = &bh - &ah * cos;
    let wn = w.norm();
    if wn > 1e-14 {
        rotation_in_plane(&ah, &(w / wn), wn.atan2(cos))
    } else if cos > 0.0 {
        DMatrix::identity(n, n)
    } else {
        // Half turn in a plane through `a`.
        let f = orthogonal_unit(&ah);
        rotation_in_plane(&ah, &f, std::f64::consts::PI)
    }
}

/// Some unit vector orthogonal to the unit vector `a`.
fn orthogonal_unit(a: &DVector<f64>) -> DVector<f64> {
    let n = a.len();
    (0..n)
        .map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            let r = &e - a * a[i];
            (r.norm(), r)
        })
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(norm, r)| r / norm)
        .expect("n >= 1")
}

/// Isometry `g` with `g·p₁ = q₁` and `g·p₂ = q₂`.
///
/// Built from canonical frames: transvect `p₁` to `z₀`, rotate the direction
/// of `p₂` onto that of `q₂`, transvect `z₀` to `q₁`. With a plane given, the
/// rotation acts in that plane only, so `g` preserves the plane's `H²` and is
/// the identity on its orthogonal complement.
pub fn pair_isometry(
    p1: &HPoint,
    p2: &HPoint,
    q1: &HPoint,
    q2: &HPoint,
    plane: Option<&SpatialPlane>,
) -> Result<GroupElement> {
    let n = p1.n();
    for p in [p2, q1, q2] {
        if p.n() != n {
            return Err(Error::AmbientMismatch(n, p.n()));
        }
    }
    let dp = dist(p1, p2);
    let dq = dist(q1, q2);
    if (dp - dq).abs() > 1e-8 * dp.max(1.0) {
        return Err(Error::DistMismatch(dp, dq));
    }
    if let Some(pl) = plane {
        if pl.n() != n {
            return Err(Error::AmbientMismatch(n, pl.n()));
        }
        let worst = [p1, p2, q1, q2]
            .iter()
            .map(|p| pl.offset(p))
            .fold(0.0, f64::max);
        if worst > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "points leave the plane (offset {worst:e})"
            )));
        }
    }
    let tp = transvection_to(p1);
    let tq = transvection_to(q1);
    let a = tp.inverse().act(p2).spatial();
    let b = tq.inverse().act(q2).spatial();
    let r = GroupElement::rotation(&rotation_taking(&a, &b, plane));
    Ok(&(&tq * &r) * &tp.inverse())
}

/// `g ∈ SO_e(n,1)` moving `z₁, z₂, z₃` into the standard totally geodesic `H²`
/// (coordinates `1..n-2` vanish), with `g·z₁ = z₀`.
///
/// Transvects `z₁` to `z₀`, then rotates the spatial parts of the other two
/// images into the standard plane; both steps are well conditioned.
pub fn plane_reduction(z1: &HPoint, z2: &HPoint, z3: &HPoint) -> GroupElement {
    let n = z1.n();
    let t = transvection_to(z1).inverse();
    if n == 2 {
        return t;
    }
    let spatial = [t.act(z2).spatial(), t.act(z3).spatial()];
    let e = |i: usize| {
        let mut x = DVector::zeros(n);
        x[i] = 1.0;
        x
    };
    let r = frame_rotation(&spatial, &[e(n - 2), e(n - 1)], n);
    &GroupElement::rotation(&r) * &t
}

/// Whether `g` lies in `exp s₀`: symmetric and positive definite within `tol`.
pub fn is_exp_s(g: &GroupElement, tol: f64) -> bool {
    let m = g.matrix();
    let scale = m.amax().max(1.0);
    if (m - m.transpose()).amax() > tol * scale {
        return false;
    }
    let sym = 0.5 * (m + m.transpose());
    SymmetricEigen::new(sym).eigenvalues.min() > 0.0
}

/// Whether `g ∈ K₀A₀` with `A₀ = exp(R X_u)`: `g⁻¹·z₀` lies on the geodesic
/// through `z₀` with direction `u`.
pub fn is_in_k0a0(g: &GroupElement, u: &DVector<f64>, tol: f64) -> Result<bool> {
    check_unit(u)?;
    let p = g.inverse().act(&HPoint::origin(g.n())).spatial();
    let off = (&p - u * u.dot(&p)).norm();
    Ok(off <= tol * p.norm().max(1.0))
}

/// Signed distance of `p` from the geodesic `{geodesic_point(u, t)}`, with
/// sign given by the side of the unit normal `normal` (orthogonal to `u`).
pub fn signed_distance_to_geodesic(p: &HPoint, normal: &DVector<f64>) -> f64 {
    normal.dot(&p.spatial()).asinh()
}
