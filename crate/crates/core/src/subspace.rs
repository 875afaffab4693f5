//! Tolerance-aware subspace arithmetic over `R^d`.
//!
//! A [`Subspace`] keeps an orthonormal frame for either the subspace itself or
//! its orthogonal complement, whichever was cheaper to obtain. Parabolic
//! subalgebras of `so(n,1)` have codimension `n - 1` inside a space of
//! dimension `n(n+1)/2`, so storing the complement keeps every rank decision
//! on thin matrices. Sums and intersections pick the representation that
//! avoids large SVDs:
//!
//! * `S1 + S2` with both frames spanning the subspace: SVD of the stacked frames.
//! * `S1 ∩ S2` is the complement of `S1⊥ + S2⊥`.
//!
//! Ranks are decided on singular values relative to the largest one.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default relative singular-value cutoff.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Frame {
    /// Columns span the subspace.
    Basis,
    /// Columns span the orthogonal complement.
    Complement,
}

/// A linear subspace of `R^d`.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    frame: DMatrix<f64>,
    kind: Frame,
    tol: f64,
}

/// Orthonormal basis of the column range of `m`, rank decided relative to the
/// largest singular value.
pub fn orthonormal_range(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let d = m.nrows();
    if m.ncols() == 0 || d == 0 {
        return DMatrix::zeros(d, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    if smax <= 0.0 || !smax.is_finite() {
        return DMatrix::zeros(d, 0);
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] >= tol * smax)
        .collect();
    DMatrix::from_fn(d, keep.len(), |r, c| u[(r, keep[c])])
}

/// Numerical rank of `m` with a relative cutoff.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.max();
    if smax <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s >= tol * smax).count()
}

/// Orthonormal basis of `{ y : m y = 0 }`, counting singular values below
/// `threshold` (absolute) as zero.
pub fn null_space(m: &DMatrix<f64>, threshold: f64) -> DMatrix<f64> {
    let cols = m.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    // Thin SVD only yields a full V when rows >= cols; zero rows leave the
    // kernel unchanged.
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] < threshold)
        .collect();
    DMatrix::from_fn(cols, idx.len(), |r, c| v_t[(idx[c], r)])
}

fn hcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    debug_assert_eq!(a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

/// Orthonormal basis of `range(a) ∩ range(b)` for orthonormal `a`, `b`.
///
/// Singular values of `[a | -b]` behave like `sqrt(2) sin(θ/2)` in the
/// principal angles, so the cutoff resolves angles down to about `tol`.
fn range_intersection(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let d = a.nrows();
    if a.ncols() == 0 || b.ncols() == 0 {
        return DMatrix::zeros(d, 0);
    }
    let stacked = hcat(a, &(-b));
    let kernel = null_space(&stacked, tol);
    if kernel.ncols() == 0 {
        return DMatrix::zeros(d, 0);
    }
    let coeff = kernel.rows(0, a.ncols()).into_owned();
    orthonormal_range(&(a * coeff), tol)
}

/// Orthonormal vectors from `vectors`, completed with coordinate vectors in
/// index order to a basis of `R^n`.
pub fn extend_to_basis(vectors: &[DVector<f64>], n: usize) -> Vec<DVector<f64>> {
    let scale = vectors.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(n);
    let candidates = vectors
        .iter()
        .cloned()
        .zip(std::iter::repeat(scale))
        .chain((0..n).map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            (e, 1.0)
        }));
    for (v, s) in candidates {
        if out.len() == n {
            break;
        }
        let mut w = v;
        for _ in 0..2 {
            for b in &out {
                let c = b.dot(&w);
                w -= b * c;
            }
        }
        let norm = w.norm();
        if norm > 1e-10 * s {
            out.push(w / norm);
        }
    }
    out
}

/// Rotation `R ∈ SO(n)` taking the orthonormalized `source` frame onto the
/// orthonormalized `target` frame, column by column; only the last column of
/// the completed target frame is negated when needed for `det R = 1`.
pub fn frame_rotation(source: &[DVector<f64>], target: &[DVector<f64>], n: usize) -> DMatrix<f64> {
    let s = extend_to_basis(source, n);
    let t = extend_to_basis(target, n);
    let sm = DMatrix::from_columns(&s);
    let mut tm = DMatrix::from_columns(&t);
    if (&tm * sm.transpose()).determinant() < 0.0 {
        tm.column_mut(n - 1).neg_mut();
    }
    tm * sm.transpose()
}

impl Subspace {
    fn check_ambient(ambient: usize) -> Result<()> {
        if ambient == 0 {
            Err(Error::EmptyAmbient)
        } else {
            Ok(())
        }
    }

    /// Span of `vectors` in `R^ambient`.
    pub fn span(ambient: usize, vectors: &[DVector<f64>], tol: f64) -> Result<Self> {
        Self::check_ambient(ambient)?;
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::AmbientMismatch(ambient, v.len()));
        }
        let m = DMatrix::from_fn(ambient, vectors.len(), |r, c| vectors[c][r]);
        Ok(Self::from_columns(&m, tol))
    }

    /// Span of the columns of `m`.
    pub fn from_columns(m: &DMatrix<f64>, tol: f64) -> Self {
        Subspace {
            ambient: m.nrows(),
            frame: orthonormal_range(m, tol),
            kind: Frame::Basis,
            tol,
        }
    }

    /// Solution space `{ x : rows · x = 0 }`, stored through its complement.
    pub fn from_constraints(ambient: usize, rows: &DMatrix<f64>, tol: f64) -> Result<Self> {
        Self::check_ambient(ambient)?;
        if rows.ncols() != ambient {
            return Err(Error::AmbientMismatch(ambient, rows.ncols()));
        }
        Ok(Subspace {
            ambient,
            frame: orthonormal_range(&rows.transpose(), tol),
            kind: Frame::Complement,
            tol,
        })
    }

    pub fn full(ambient: usize) -> Result<Self> {
        Self::check_ambient(ambient)?;
        Ok(Subspace {
            ambient,
            frame: DMatrix::zeros(ambient, 0),
            kind: Frame::Complement,
            tol: DEFAULT_RANK_TOL,
        })
    }

    pub fn zero(ambient: usize) -> Result<Self> {
        Self::check_ambient(ambient)?;
        Ok(Subspace {
            ambient,
            frame: DMatrix::zeros(ambient, 0),
            kind: Frame::Basis,
            tol: DEFAULT_RANK_TOL,
        })
    }

    /// The diagonal `{(v, ..., v)}` inside `(R^d)^copies`.
    pub fn diagonal(ambient: usize, copies: usize) -> Result<Self> {
        Self::check_ambient(ambient)?;
        let scale = 1.0 / (copies as f64).sqrt();
        let frame = DMatrix::from_fn(ambient * copies, ambient, |r, c| {
            if r % ambient == c {
                scale
            } else {
                0.0
            }
        });
        Ok(Subspace {
            ambient: ambient * copies,
            frame,
            kind: Frame::Basis,
            tol: DEFAULT_RANK_TOL,
        })
    }

    /// Cartesian product `S1 × S2 × ...` inside the product space.
    pub fn product(factors: &[&Subspace]) -> Result<Self> {
        let ambient: usize = factors.iter().map(|s| s.ambient).sum();
        Self::check_ambient(ambient)?;
        let tol = factors.iter().map(|s| s.tol).fold(0.0, f64::max);
        let all_basis = factors.iter().all(|s| s.kind == Frame::Basis);
        let frames: Vec<DMatrix<f64>> = if all_basis {
            factors.iter().map(|s| s.frame.clone()).collect()
        } else {
            // The complement of a product is the product of the complements.
            factors.iter().map(|s| s.complement_frame()).collect()
        };
        let cols: usize = frames.iter().map(|f| f.ncols()).sum();
        let mut frame = DMatrix::zeros(ambient, cols);
        let (mut r0, mut c0) = (0, 0);
        for (s, f) in factors.iter().zip(&frames) {
            frame
                .view_mut((r0, c0), (s.ambient, f.ncols()))
                .copy_from(f);
            r0 += s.ambient;
            c0 += f.ncols();
        }
        Ok(Subspace {
            ambient,
            frame,
            kind: if all_basis {
                Frame::Basis
            } else {
                Frame::Complement
            },
            tol,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            Frame::Basis => self.frame.ncols(),
            Frame::Complement => self.ambient - self.frame.ncols(),
        }
    }

    /// Orthonormal basis as columns. Costs an SVD of size `d × d` when only
    /// the complement is stored.
    pub fn basis(&self) -> DMatrix<f64> {
        match self.kind {
            Frame::Basis => self.frame.clone(),
            Frame::Complement => null_space(&self.frame.transpose(), 0.5),
        }
    }

    /// Basis vectors as a list.
    pub fn basis_vectors(&self) -> Vec<DVector<f64>> {
        let b = self.basis();
        (0..b.ncols()).map(|c| b.column(c).into_owned()).collect()
    }

    fn complement_frame(&self) -> DMatrix<f64> {
        match self.kind {
            Frame::Complement => self.frame.clone(),
            // Frame columns are orthonormal, so their singular values are 1.
            Frame::Basis => null_space(&self.frame.transpose(), 0.5),
        }
    }

    /// Orthogonal complement.
    pub fn complement(&self) -> Subspace {
        Subspace {
            ambient: self.ambient,
            frame: self.frame.clone(),
            kind: match self.kind {
                Frame::Basis => Frame::Complement,
                Frame::Complement => Frame::Basis,
            },
            tol: self.tol,
        }
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        let ff = &self.frame * self.frame.transpose();
        match self.kind {
            Frame::Basis => ff,
            Frame::Complement => DMatrix::identity(self.ambient, self.ambient) - ff,
        }
    }

    /// Distance from `v` to the subspace.
    pub fn distance(&self, v: &DVector<f64>) -> Result<f64> {
        if v.len() != self.ambient {
            return Err(Error::AmbientMismatch(self.ambient, v.len()));
        }
        let coeff = self.frame.transpose() * v;
        Ok(match self.kind {
            Frame::Basis => (v - &self.frame * coeff).norm(),
            Frame::Complement => coeff.norm(),
        })
    }

    /// Membership up to `tol · max(1, |v|)`.
    pub fn contains(&self, v: &DVector<f64>) -> Result<bool> {
        Ok(self.distance(v)? <= self.tol * v.norm().max(1.0))
    }

    /// Same projector within `tol` (max-entry norm).
    pub fn same_as(&self, other: &Subspace, tol: f64) -> bool {
        self.ambient == other.ambient
            && self.dim() == other.dim()
            && (self.projector() - other.projector()).amax() <= tol
    }

    fn check_pair(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            Err(Error::AmbientMismatch(self.ambient, other.ambient))
        } else {
            Ok(())
        }
    }

    /// `S1 + S2`.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_pair(other)?;
        let tol = self.tol.max(other.tol);
        let (frame, kind) = match (self.kind, other.kind) {
            (Frame::Basis, Frame::Basis) => (
                orthonormal_range(&hcat(&self.frame, &other.frame), tol),
                Frame::Basis,
            ),
            (Frame::Complement, Frame::Complement) => (
                range_intersection(&self.frame, &other.frame, tol),
                Frame::Complement,
            ),
            (Frame::Basis, Frame::Complement) | (Frame::Complement, Frame::Basis) => {
                let (b, c) = if self.kind == Frame::Basis {
                    (&self.frame, &other.frame)
                } else {
                    (&other.frame, &self.frame)
                };
                // (B + S)⊥ = B⊥ ∩ range(C) = C · ker(Bᵀ C)
                let kernel = null_space(&(b.transpose() * c), tol);
                (c * kernel, Frame::Complement)
            }
        };
        Ok(Subspace {
            ambient: self.ambient,
            frame,
            kind,
            tol,
        })
    }

    /// `S1 ∩ S2`, computed as the complement of `S1⊥ + S2⊥`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_pair(other)?;
        Ok(self.complement().sum(&other.complement())?.complement())
    }
}

/// Result of splitting `x ∈ V³` as `(c₁, c₂, c₃) + diag(w)` with `c_j ∈ U_j`.
#[derive(Clone, Debug)]
pub struct TripleSumSplit {
    /// `u_j ∈ U_j` from `x_j = u_j + t_j`.
    pub u: [DVector<f64>; 3],
    /// `t_j ∈ U_k ∩ U_l`.
    pub t: [DVector<f64>; 3],
    /// `(u₁ - t₂ - t₃, u₂ - t₁ - t₃, u₃ - t₁ - t₂)`.
    pub components: [DVector<f64>; 3],
    /// `t₁ + t₂ + t₃`.
    pub diag_part: DVector<f64>,
    pub residual: f64,
}

fn check_triple(u: [&Subspace; 3]) -> Result<usize> {
    let d = u[0].ambient;
    for s in &u[1..] {
        if s.ambient != d {
            return Err(Error::AmbientMismatch(d, s.ambient));
        }
    }
    Ok(d)
}

/// `V = U₁ + (U₂∩U₃) = U₂ + (U₃∩U₁) = U₃ + (U₁∩U₂)` with `V = R^d`.
pub fn triple_sum_decomposable(u1: &Subspace, u2: &Subspace, u3: &Subspace) -> Result<bool> {
    Ok(triple_sum_dims(u1, u2, u3)?
        .iter()
        .all(|&k| k == u1.ambient))
}

/// Dimensions of the three sums `U_j + (U_k ∩ U_l)`.
pub fn triple_sum_dims(u1: &Subspace, u2: &Subspace, u3: &Subspace) -> Result<[usize; 3]> {
    check_triple([u1, u2, u3])?;
    let s1 = u1.sum(&u2.intersect(u3)?)?.dim();
    let s2 = u2.sum(&u3.intersect(u1)?)?.dim();
    let s3 = u3.sum(&u1.intersect(u2)?)?.dim();
    Ok([s1, s2, s3])
}

/// `dim(U₁×U₂×U₃ + diag(V))` inside `V³`.
pub fn direct_triple_rank(u1: &Subspace, u2: &Subspace, u3: &Subspace) -> Result<usize> {
    let d = check_triple([u1, u2, u3])?;
    let product = Subspace::product(&[u1, u2, u3])?;
    let diag = Subspace::diagonal(d, 3)?.with_tol(product.tol);
    Ok(product.sum(&diag)?.dim())
}

/// Minimum-norm coefficients of `x` in the columns of `m`.
fn min_norm_solve(m: &DMatrix<f64>, x: &DVector<f64>, tol: f64) -> DVector<f64> {
    if m.ncols() == 0 {
        return DVector::zeros(0);
    }
    let svd = m.clone().svd(true, true);
    let eps = tol * svd.singular_values.max();
    svd.solve(x, eps).expect("both factors computed")
}

/// Split `x = (x₁,x₂,x₃)` along `U + diag(V)`.
pub fn split_triple(x: [&DVector<f64>; 3], u: [&Subspace; 3]) -> Result<TripleSumSplit> {
    let d = check_triple(u)?;
    for xi in x {
        if xi.len() != d {
            return Err(Error::AmbientMismatch(d, xi.len()));
        }
    }
    let dims = triple_sum_dims(u[0], u[1], u[2])?;
    if dims.iter().any(|&k| k != d) {
        return Err(Error::NotDecomposable(format!(
            "sum dimensions {dims:?} in ambient dimension {d}"
        )));
    }
    let tol = u.iter().map(|s| s.tol).fold(0.0, f64::max);
    let mut us = Vec::with_capacity(3);
    let mut ts = Vec::with_capacity(3);
    for j in 0..3 {
        let (k, l) = ((j + 1) % 3, (j + 2) % 3);
        let own = u[j].basis();
        let shared = u[k].intersect(u[l])?.basis();
        let m = hcat(&own, &shared);
        let c = min_norm_solve(&m, x[j], tol);
        us.push(&own * c.rows(0, own.ncols()));
        ts.push(&shared * c.rows(own.ncols(), shared.ncols()));
    }
    let components = [
        &us[0] - &ts[1] - &ts[2],
        &us[1] - &ts[0] - &ts[2],
        &us[2] - &ts[0] - &ts[1],
    ];
    let diag_part = &ts[0] + &ts[1] + &ts[2];
    let residual = (0..3)
        .map(|j| (x[j] - &components[j] - &diag_part).norm_squared())
        .sum::<f64>()
        .sqrt();
    let scale = x.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
    if residual > 1e-9 * scale {
        return Err(Error::NumericalFailure(format!(
            "split residual {residual:e} exceeds 1e-9 relative to |x| = {scale:e}"
        )));
    }
    let [u0, u1, u2]: [DVector<f64>; 3] = us.try_into().expect("three parts");
    let [t0, t1, t2]: [DVector<f64>; 3] = ts.try_into().expect("three parts");
    Ok(TripleSumSplit {
        u: [u0, u1, u2],
        t: [t0, t1, t2],
        components,
        diag_part,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(d: usize, i: usize) -> DVector<f64> {
        DVector::from_fn(d, |r, _| if r == i { 1.0 } else { 0.0 })
    }

    fn span(d: usize, v: &[DVector<f64>]) -> Subspace {
        Subspace::span(d, v, DEFAULT_RANK_TOL).unwrap()
    }

    #[test]
    fn span_counts_rank() {
        assert_eq!(span(3, &[e(3, 0), e(3, 0) * 2.0]).dim(), 1);
        assert_eq!(span(3, &[]).dim(), 0);
        assert_eq!(span(3, &[e(3, 0), e(3, 1), e(3, 0) + e(3, 1)]).dim(), 2);
    }

    #[test]
    fn span_rejects_empty_ambient_and_mismatch() {
        assert_eq!(
            Subspace::span(0, &[], 1e-9).unwrap_err(),
            Error::EmptyAmbient
        );
        assert!(matches!(
            Subspace::span(3, &[e(2, 0)], 1e-9),
            Err(Error::AmbientMismatch(3, 2))
        ));
    }

    #[test]
    fn sums() {
        let a = span(3, &[e(3, 0)]);
        let b = span(3, &[e(3, 1)]);
        assert_eq!(a.sum(&b).unwrap().dim(), 2);
        let s = span(3, &[e(3, 0), e(3, 1) + e(3, 2)]);
        assert!(s.sum(&s).unwrap().same_as(&s, 1e-12));
        let c = span(3, &[e(3, 0) + e(3, 1)]);
        assert_eq!(a.sum(&c).unwrap().dim(), 2);
        assert!(a.sum(&span(4, &[e(4, 0)])).is_err());
    }

    #[test]
    fn intersections() {
        let a = span(3, &[e(3, 0), e(3, 1)]);
        let b = span(3, &[e(3, 1), e(3, 2)]);
        let i = a.intersect(&b).unwrap();
        assert!(i.same_as(&span(3, &[e(3, 1)]), 1e-12));
        assert!(a.intersect(&a).unwrap().same_as(&a, 1e-12));
    }

    #[test]
    fn complement_representation_agrees_with_basis() {
        // Constraint x0 + x1 = 0 in R^3
        let rows = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let c = Subspace::from_constraints(3, &rows, DEFAULT_RANK_TOL).unwrap();
        let b = span(3, &[e(3, 0) - e(3, 1), e(3, 2)]);
        assert_eq!(c.dim(), 2);
        assert!(c.same_as(&b, 1e-12));
        let line = span(3, &[e(3, 0)]);
        assert_eq!(c.sum(&line).unwrap().dim(), 3);
        assert_eq!(c.intersect(&line).unwrap().dim(), 0);
        assert!(c.intersect(&b).unwrap().same_as(&b, 1e-12));
        assert!(c.contains(&(e(3, 0) - e(3, 1))).unwrap());
        assert!(!c.contains(&e(3, 0)).unwrap());
        assert_eq!(c.basis().ncols(), 2);
    }

    #[test]
    fn coordinate_planes_are_decomposable() {
        let u1 = span(3, &[e(3, 0), e(3, 1)]);
        let u2 = span(3, &[e(3, 1), e(3, 2)]);
        let u3 = span(3, &[e(3, 0), e(3, 2)]);
        assert!(triple_sum_decomposable(&u1, &u2, &u3).unwrap());
        assert_eq!(direct_triple_rank(&u1, &u2, &u3).unwrap(), 9);
    }

    #[test]
    fn repeated_proper_subspace_is_not_decomposable() {
        let p = span(3, &[e(3, 0), e(3, 1)]);
        let q = span(3, &[e(3, 1), e(3, 2)]);
        assert!(!triple_sum_decomposable(&p, &p, &q).unwrap());
        assert!(direct_triple_rank(&p, &p, &q).unwrap() < 9);
        let x = e(3, 2);
        let z = DVector::zeros(3);
        assert!(matches!(
            split_triple([&x, &z, &z], [&p, &p, &q]),
            Err(Error::NotDecomposable(_))
        ));
    }

    #[test]
    fn full_space_triple() {
        let v = Subspace::full(4).unwrap();
        assert!(triple_sum_decomposable(&v, &v, &v).unwrap());
    }

    #[test]
    fn split_of_zero_and_aligned_vector() {
        let u1 = span(3, &[e(3, 0), e(3, 1)]);
        let u2 = span(3, &[e(3, 1), e(3, 2)]);
        let u3 = span(3, &[e(3, 0), e(3, 2)]);
        let z = DVector::zeros(3);
        let s = split_triple([&z, &z, &z], [&u1, &u2, &u3]).unwrap();
        assert!(s.components.iter().all(|c| c.norm() == 0.0));
        assert_eq!(s.diag_part.norm(), 0.0);

        let x1 = e(3, 0);
        let s = split_triple([&x1, &z, &z], [&u1, &u2, &u3]).unwrap();
        assert!((&s.u[0] - &x1).norm() < 1e-14);
        assert!(s.t.iter().all(|t| t.norm() < 1e-14));
        assert!(s.residual < 1e-14);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        let k = null_space(&m, 1e-9);
        assert_eq!(k.ncols(), 2);
        assert!((m * k).amax() < 1e-15);
    }
}
