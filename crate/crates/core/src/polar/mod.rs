//! Polar decomposition `G = K·A·H` of the triple space, its Euclidean and
//! infinitesimal counterparts, and the residual symmetry of the `A` factor.

mod euclid;
mod kah;
mod slide;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lorentz::{exp_boost, log_geodesic, GroupElement, HPoint};
use crate::subspace::numerical_rank;
pub(crate) use crate::subspace::{extend_to_basis, frame_rotation};

pub use euclid::{
    euclid_fit, infinitesimal_polar_decompose, EuclideanMotion, InfinitesimalPolar, EUCLID_TOL,
};
pub use kah::{kah_decompose, KahResult, SlideDiagnostics, KAH_TOL};
pub use slide::{slide_path, SlidePath, SlideSample};

/// Relative singular-value threshold for the rank of a direction triple.
pub const RANK_TOL: f64 = 1e-9;

/// Unit directions `u₁, u₂, u₃ ∈ R^n` of the three lines `a_j = R X_{u_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleDirections {
    u: [DVector<f64>; 3],
}

impl TripleDirections {
    pub fn new(u1: DVector<f64>, u2: DVector<f64>, u3: DVector<f64>) -> Result<Self> {
        let n = u1.len();
        if n < 2 {
            return Err(Error::DimensionMismatch(format!("need n >= 2, got {n}")));
        }
        for u in [&u2, &u3] {
            if u.len() != n {
                return Err(Error::AmbientMismatch(n, u.len()));
            }
        }
        for u in [&u1, &u2, &u3] {
            let norm = u.norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::NotUnit(norm));
            }
        }
        Ok(Self { u: [u1, u2, u3] })
    }

    /// Normalizes each vector first; zero vectors are rejected.
    pub fn normalized(u1: DVector<f64>, u2: DVector<f64>, u3: DVector<f64>) -> Result<Self> {
        let norm = |u: DVector<f64>| -> Result<DVector<f64>> {
            let l = u.norm();
            if l > 0.0 && l.is_finite() {
                Ok(u / l)
            } else {
                Err(Error::NotUnit(l))
            }
        };
        Self::new(norm(u1)?, norm(u2)?, norm(u3)?)
    }

    pub fn n(&self) -> usize {
        self.u[0].len()
    }

    pub fn u(&self, j: usize) -> &DVector<f64> {
        &self.u[j]
    }

    pub fn dirs(&self) -> &[DVector<f64>; 3] {
        &self.u
    }

    pub fn rank(&self) -> usize {
        rank_of_config(self)
    }
}

/// Dimension of `span{u₁, u₂, u₃}`.
pub fn rank_of_config(dirs: &TripleDirections) -> usize {
    let n = dirs.n();
    let m = DMatrix::from_fn(3, n, |r, c| dirs.u[r][c]);
    numerical_rank(&m, RANK_TOL)
}

/// Closest rotation to `m` in Frobenius norm.
pub(crate) fn nearest_rotation(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v requested");
    let mut r = &u * &v_t;
    if r.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(n - 1).neg_mut();
        r = u * v_t;
    }
    r
}

/// Sign actions `(δ, ε)` of the normalizer on `(t₁, t₂, t₃)` when
/// `u₁ = u₂ ⊥ u₃`: all four for `n > 2`, only `δ = ε` for `n = 2`.
pub fn a_sign_actions(n: usize) -> Vec<(f64, f64)> {
    if n == 2 {
        vec![(1.0, 1.0), (-1.0, -1.0)]
    } else {
        vec![(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
    }
}

fn act_signs(t: [f64; 3], (delta, eps): (f64, f64)) -> [f64; 3] {
    // `+ 0.0` folds negative zero into zero.
    [delta * t[0] + 0.0, delta * t[1] + 0.0, eps * t[2] + 0.0]
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// The orbit of `t` under [`a_sign_actions`].
pub fn a_orbit(t: [f64; 3], n: usize) -> Vec<[f64; 3]> {
    a_sign_actions(n)
        .into_iter()
        .map(|s| act_signs(t, s))
        .collect()
}

/// Orbit representative: for `n > 2`, `(t₁, t₂)` lexicographically maximal
/// and `t₃ ≥ 0`; for `n = 2`, the lexicographically maximal of `±t`.
pub fn canonical_a(t: [f64; 3], n: usize) -> [f64; 3] {
    if n == 2 {
        a_orbit(t, n)
            .into_iter()
            .max_by(|a, b| lex_cmp(a, b))
            .expect("nonempty orbit")
    } else {
        let pair = [[t[0] + 0.0, t[1] + 0.0], [-t[0] + 0.0, -t[1] + 0.0]]
            .into_iter()
            .max_by(|a, b| lex_cmp(a, b))
            .expect("two candidates");
        [pair[0], pair[1], t[2].abs()]
    }
}

/// Whether `t` and `t'` are `A` coordinates of the same double coset, i.e.
/// whether `t'` lies within `tol` (max norm) of the sign orbit of `t`.
///
/// Requires `t₁ ≠ t₂` for both inputs.
pub fn same_orbit(t: [f64; 3], t_other: [f64; 3], n: usize, tol: f64) -> Result<bool> {
    for x in [t, t_other] {
        if (x[0] - x[1]).abs() <= tol {
            return Err(Error::HypothesisViolated(format!(
                "equal first two coordinates ({}, {})",
                x[0], x[1]
            )));
        }
    }
    Ok(a_orbit(t, n)
        .iter()
        .any(|x| x.iter().zip(&t_other).all(|(a, b)| (a - b).abs() <= tol)))
}

/// Element `m ∈ K₀` with `m u = δ u` and `m v = ε v` for orthonormal `u, v`,
/// acting by signs in a frame adapted to `(v, ..., u)`.
pub fn normalizer_element(
    u: &DVector<f64>,
    v: &DVector<f64>,
    delta: f64,
    eps: f64,
) -> Result<GroupElement> {
    let n = u.len();
    if v.len() != n {
        return Err(Error::AmbientMismatch(n, v.len()));
    }
    if u.dot(v).abs() > 1e-9 || (u.norm() - 1.0).abs() > 1e-9 || (v.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(
            "normalizer needs orthonormal u, v".into(),
        ));
    }
    if delta.abs() != 1.0 || eps.abs() != 1.0 {
        return Err(Error::InvalidConfig(format!(
            "signs must be ±1, got ({delta}, {eps})"
        )));
    }
    let mut signs = DVector::from_element(n, 1.0);
    signs[0] = eps;
    signs[n - 1] = delta;
    if n == 2 {
        if delta != eps {
            return Err(Error::InvalidConfig(
                "for n = 2 the normalizer acts by a common sign".into(),
            ));
        }
    } else {
        signs[1] = delta * eps;
    }
    let mut frame_vecs = extend_to_basis(&[v.clone(), u.clone()], n);
    // Move `u` to the last slot.
    let u_col = frame_vecs.remove(1);
    frame_vecs.push(u_col);
    let f = DMatrix::from_columns(&frame_vecs);
    let m = &f * DMatrix::from_diagonal(&signs) * f.transpose();
    Ok(GroupElement::rotation(&m))
}

/// Refactors `g = k·a·h` as `(k m⁻¹)·(m a m⁻¹)·(m h)` for `m ∈ K₀` acting
/// diagonally, reading the new `A` coordinates off `m a_j m⁻¹`.
pub fn conjugate_by_normalizer(
    res: &KahResult,
    dirs: &TripleDirections,
    m: &GroupElement,
) -> Result<KahResult> {
    let n = dirs.n();
    let m_inv = m.inverse();
    let z0 = HPoint::origin(n);
    let mut t = [0.0; 3];
    let mut k = res.k.clone();
    for j in 0..3 {
        let a = exp_boost(&(dirs.u(j) * res.t[j]));
        let a_conj = &(m * &a) * &m_inv;
        t[j] = log_geodesic(dirs.u(j), &a_conj.act(&z0))?;
        k[j] = &res.k[j] * &m_inv;
    }
    let h = m * &res.h;
    let mut out = KahResult {
        k,
        t,
        h,
        residual: 0.0,
        k_defect: res.k_defect,
        slide: res.slide,
    };
    out.residual = out.max_deviation(&res.recompose(dirs), dirs);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn ranks() {
        let n = 3;
        let r = |a, b, c| TripleDirections::new(a, b, c).unwrap().rank();
        assert_eq!(r(e(n, 0), e(n, 0), e(n, 0)), 1);
        let diag = (e(n, 0) + e(n, 1)) / 2f64.sqrt();
        assert_eq!(r(e(n, 0), e(n, 1), diag), 2);
        assert_eq!(r(e(n, 0), e(n, 1), e(n, 2)), 3);
        assert_eq!(r(e(n, 0), -e(n, 0), e(n, 0)), 1);
    }

    #[test]
    fn direction_validation() {
        assert!(matches!(
            TripleDirections::new(e(3, 0) * 2.0, e(3, 1), e(3, 2)),
            Err(Error::NotUnit(_))
        ));
        assert!(matches!(
            TripleDirections::new(e(3, 0), e(2, 1), e(3, 2)),
            Err(Error::AmbientMismatch(3, 2))
        ));
        assert!(TripleDirections::normalized(e(3, 0) * 2.0, e(3, 1), e(3, 2)).is_ok());
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(canonical_a([0.0, 0.0, 0.0], 3), [0.0, 0.0, 0.0]);
        assert_eq!(canonical_a([-1.0, -2.0, 3.0], 3), [1.0, 2.0, 3.0]);
        assert_eq!(canonical_a([-1.0, -2.0, 3.0], 2), [1.0, 2.0, -3.0]);
        assert_eq!(canonical_a([0.0, -2.0, -3.0], 3), [0.0, 2.0, 3.0]);
        assert_eq!(canonical_a([0.0, 0.0, -3.0], 2), [0.0, 0.0, 3.0]);
    }

    #[test]
    fn orbit_predicate() {
        assert!(same_orbit([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 3, 1e-9).unwrap());
        assert!(same_orbit([1.0, 2.0, 3.0], [-1.0, -2.0, 3.0], 3, 1e-9).unwrap());
        assert!(!same_orbit([1.0, 2.0, 3.0], [-1.0, -2.0, 3.0], 2, 1e-9).unwrap());
        assert!(same_orbit([1.0, 2.0, 3.0], [-1.0, -2.0, -3.0], 2, 1e-9).unwrap());
        assert!(!same_orbit([1.0, 2.0, 3.0], [2.0, 1.0, 3.0], 3, 1e-9).unwrap());
        assert!(matches!(
            same_orbit([1.0, 1.0, 3.0], [1.0, 2.0, 3.0], 3, 1e-9),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn normalizer_signs() {
        for n in [2, 3, 5] {
            let u = e(n, n - 1);
            let v = e(n, 0);
            for (d, s) in a_sign_actions(n) {
                let m = normalizer_element(&u, &v, d, s).unwrap();
                assert!(m.satisfies_invariants(1e-12));
                let r = m.spatial_block();
                assert!((&r * &u - &u * d).norm() < 1e-14);
                assert!((&r * &v - &v * s).norm() < 1e-14);
            }
        }
        assert!(normalizer_element(&e(2, 1), &e(2, 0), 1.0, -1.0).is_err());
    }

    #[test]
    fn frame_rotation_maps_frames() {
        let n = 4;
        let src = [
            DVector::from_vec(vec![1.0, 2.0, 0.0, -1.0]),
            DVector::from_vec(vec![0.0, 1.0, 1.0, 1.0]),
        ];
        let r = frame_rotation(&src, &[e(n, 2), e(n, 3)], n);
        assert!((r.determinant() - 1.0).abs() < 1e-12);
        assert!((&r.transpose() * &r - DMatrix::identity(n, n)).norm() < 1e-12);
        for s in &src {
            let img = &r * s;
            assert!(img[0].abs() < 1e-12 && img[1].abs() < 1e-12);
        }
    }
}
