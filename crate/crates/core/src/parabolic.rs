//! Parabolic subalgebras `p_q ⊂ so(n,1)` stabilizing isotropic lines
//! `R(q, 1)`, their intersections and the sphericality test `g = p + h` on
//! `g = so(n,1)³` with `h` the diagonal.
//!
//! Every dimension is computed twice: from an explicit basis whose rank is
//! read off in a frame adapted to the `q`'s, and numerically as an
//! intersection of constraint subspaces in coordinate space.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lorentz::{algebra_dim, AlgebraElement};
use crate::polar::TripleDirections;
use crate::subspace::{
    direct_triple_rank, extend_to_basis, triple_sum_decomposable, Subspace, DEFAULT_RANK_TOL,
};

/// Two unit vectors closer than this are ambiguous unless exactly equal.
pub const DISTINCT_TOL: f64 = 1e-8;
/// Relative tolerance of the membership condition.
pub const MEMBERSHIP_TOL: f64 = 1e-10;
const UNIT_TOL: f64 = 1e-9;

/// `½(n² − n + 2)`.
pub fn parabolic_dim(n: usize) -> usize {
    (n * n - n + 2) / 2
}

/// `½(n² − 3n + 4)`.
pub fn pair_dim(n: usize) -> usize {
    (n * n + 4 - 3 * n) / 2
}

/// `½(n² − 5n + 6)`, which is `0` for `n ≤ 3`.
pub fn triple_dim(n: usize) -> usize {
    if n <= 3 {
        0
    } else {
        (n - 2) * (n - 3) / 2
    }
}

/// Stabilizer of the isotropic line through `(q, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Parabolic {
    q: DVector<f64>,
}

impl Parabolic {
    pub fn new(q: DVector<f64>) -> Result<Self> {
        if q.len() < 2 {
            return Err(Error::DimensionMismatch(format!(
                "need n >= 2, got {}",
                q.len()
            )));
        }
        let norm = q.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit(norm));
        }
        Ok(Parabolic { q })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &DVector<f64> {
        &self.q
    }

    pub fn opposite(&self) -> Parabolic {
        Parabolic { q: -&self.q }
    }

    /// Rows of the linear map `X ↦ Aq + b − (b·q) q` in coordinates.
    pub fn constraint_rows(&self) -> DMatrix<f64> {
        let n = self.n();
        let q = &self.q;
        let mut rows = DMatrix::zeros(n, algebra_dim(n));
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                rows[(i, k)] = q[j];
                rows[(j, k)] = -q[i];
                k += 1;
            }
        }
        for r in 0..n {
            for m in 0..n {
                let delta = if r == m { 1.0 } else { 0.0 };
                rows[(r, k + m)] = delta - q[m] * q[r];
            }
        }
        rows
    }

    /// `p_q` as a subspace of coordinate space.
    pub fn subspace(&self) -> Subspace {
        Subspace::from_constraints(
            algebra_dim(self.n()),
            &self.constraint_rows(),
            DEFAULT_RANK_TOL,
        )
        .expect("constraint rows match the ambient dimension")
    }
}

/// `|Aq + b − (b·q) q|`.
pub fn membership_defect(x: &AlgebraElement, p: &Parabolic) -> f64 {
    let q = p.q();
    (&x.a * q + &x.b - q * x.b.dot(q)).norm()
}

/// Membership `Aq + b = (b·q) q` within `MEMBERSHIP_TOL · max(1, |X|)`.
pub fn in_parabolic(x: &AlgebraElement, p: &Parabolic) -> bool {
    if x.n() != p.n() {
        return false;
    }
    let scale = x.coords().norm().max(1.0);
    membership_defect(x, p) <= MEMBERSHIP_TOL * scale
}

/// Skew `A` with `A q_i = y_i` for the independent `q`'s, vanishing on the
/// block spanned by `complement`. Requires `q_iᵀ y_j = −q_jᵀ y_i`.
struct SkewSolver {
    frame: DMatrix<f64>,
    frame_inv: DMatrix<f64>,
    k: usize,
}

impl SkewSolver {
    fn new(qs: &[DVector<f64>], complement: &[DVector<f64>]) -> Result<Self> {
        let cols: Vec<DVector<f64>> = qs.iter().chain(complement).cloned().collect();
        let frame = DMatrix::from_columns(&cols);
        let frame_inv = frame
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NumericalFailure("adapted frame is singular".into()))?;
        Ok(SkewSolver {
            frame,
            frame_inv,
            k: qs.len(),
        })
    }

    fn solve(&self, ys: &[DVector<f64>]) -> DMatrix<f64> {
        let n = self.frame.nrows();
        // M = Fᵀ A F has column i equal to Fᵀ y_i for i < k.
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (i, y) in ys.iter().enumerate() {
            let col = self.frame.transpose() * y;
            for j in 0..n {
                if j < self.k {
                    if j < i {
                        let v = 0.5 * (col[j] - m[(i, j)]);
                        m[(j, i)] = v;
                        m[(i, j)] = -v;
                    } else if j == i {
                        m[(j, i)] = 0.0;
                    } else {
                        m[(j, i)] = col[j];
                    }
                } else {
                    m[(j, i)] = col[j];
                    m[(i, j)] = -col[j];
                }
            }
        }
        let a = self.frame_inv.transpose() * m * &self.frame_inv;
        0.5 * (&a - a.transpose())
    }
}

/// `c_i c_jᵀ − c_j c_iᵀ` for all pairs of the given orthonormal vectors.
fn free_block(complement: &[DVector<f64>]) -> Vec<AlgebraElement> {
    let n = complement.first().map_or(0, |c| c.len());
    let mut out = Vec::new();
    for i in 0..complement.len() {
        for j in (i + 1)..complement.len() {
            let (ci, cj) = (&complement[i], &complement[j]);
            out.push(AlgebraElement {
                a: ci * cj.transpose() - cj * ci.transpose(),
                b: DVector::zeros(n),
            });
        }
    }
    out
}

/// An explicit basis together with the orthonormal frame whose first `k`
/// columns span the `q`'s; the rest carry the free block.
#[derive(Clone, Debug)]
pub struct ExplicitBasis {
    pub elements: Vec<AlgebraElement>,
    frame: DMatrix<f64>,
    k: usize,
}

impl ExplicitBasis {
    fn new(elements: Vec<AlgebraElement>, frame_cols: &[DVector<f64>], k: usize) -> Self {
        ExplicitBasis {
            elements,
            frame: DMatrix::from_columns(frame_cols),
            k,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Rank of the elements. In the adapted frame the free block consists of
    /// coordinate unit vectors and the remaining elements vanish on it, so
    /// only the latter need an SVD. Falls back to a full SVD if that block
    /// structure is not observed.
    pub fn rank(&self) -> usize {
        let n = self.frame.nrows();
        let k = self.k;
        let f = &self.frame;
        let mut mixed: Vec<DVector<f64>> = Vec::new();
        let mut free: Vec<DVector<f64>> = Vec::new();
        let mut structured = true;
        for x in &self.elements {
            let a = f.transpose() * &x.a * f;
            let b = f.transpose() * &x.b;
            let mut outer = Vec::new();
            let mut inner = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if i >= k {
                        inner.push(a[(i, j)]);
                    } else {
                        outer.push(a[(i, j)]);
                    }
                }
            }
            outer.extend(b.iter());
            let (outer, inner) = (DVector::from_vec(outer), DVector::from_vec(inner));
            let scale = outer.norm().max(inner.norm());
            if scale == 0.0 {
                continue;
            }
            let small = 1e-12 * scale;
            match (outer.norm() > small, inner.norm() > small) {
                (true, false) => mixed.push(outer),
                (false, true) => free.push(inner),
                _ => structured = false,
            }
        }
        if structured && unit_like_distinct(&free) {
            let mixed_rank = if mixed.is_empty() {
                0
            } else {
                Subspace::from_columns(&DMatrix::from_columns(&mixed), DEFAULT_RANK_TOL).dim()
            };
            return mixed_rank + free.len();
        }
        let coords: Vec<DVector<f64>> = self.elements.iter().map(|x| x.coords()).collect();
        Subspace::span(algebra_dim(n), &coords, DEFAULT_RANK_TOL)
            .map(|s| s.dim())
            .unwrap_or(0)
    }

    /// Largest relative membership defect over the elements and parabolics.
    pub fn max_membership_defect(&self, ps: &[&Parabolic]) -> f64 {
        self.elements
            .iter()
            .flat_map(|x| {
                let scale = x.coords().norm().max(1.0);
                ps.iter().map(move |p| membership_defect(x, p) / scale)
            })
            .fold(0.0, f64::max)
    }
}

/// Vectors each dominated by a distinct coordinate, with off-peak mass small
/// enough that the Gram matrix is diagonally dominant.
fn unit_like_distinct(vs: &[DVector<f64>]) -> bool {
    let bound = 1.0 / (4.0 * (vs.len() as f64 + 1.0));
    let mut seen = std::collections::BTreeSet::new();
    vs.iter().all(|v| {
        let idx = v.iamax();
        let peak = v[idx].abs();
        let rest = (v.norm_squared() - peak * peak).max(0.0).sqrt();
        seen.insert(idx) && rest <= bound * peak
    })
}

/// Basis of `p_q`: for each coordinate vector `b` the element with
/// `A q = (b·q) q − b` and no free part, then `so(n−1)` annihilating `q`.
pub fn parabolic_basis(p: &Parabolic) -> Result<ExplicitBasis> {
    let n = p.n();
    let q = p.q().clone();
    let frame = extend_to_basis(std::slice::from_ref(&q), n);
    let complement = &frame[1..];
    let solver = SkewSolver::new(std::slice::from_ref(&q), complement)?;
    let mut elements = Vec::with_capacity(parabolic_dim(n));
    for m in 0..n {
        let mut b = DVector::zeros(n);
        b[m] = 1.0;
        let y = &q * b.dot(&q) - &b;
        elements.push(AlgebraElement {
            a: solver.solve(&[y]),
            b,
        });
    }
    elements.extend(free_block(complement));
    Ok(ExplicitBasis::new(elements, &frame, 1))
}

fn check_same_n(ps: &[&Parabolic]) -> Result<usize> {
    let n = ps[0].n();
    for p in &ps[1..] {
        if p.n() != n {
            return Err(Error::AmbientMismatch(n, p.n()));
        }
    }
    Ok(n)
}

/// Equal, distinct, or too close to tell.
fn separation(p: &Parabolic, r: &Parabolic) -> Result<bool> {
    let gap = (p.q() - r.q()).norm();
    if gap == 0.0 {
        Ok(false)
    } else if gap <= DISTINCT_TOL {
        Err(Error::InvalidConfig(format!(
            "points {gap:e} apart are neither equal nor distinct"
        )))
    } else {
        Ok(true)
    }
}

/// Basis of `p_{q1} ∩ p_{q2}`: `b ⊥ q1 + q2` with `A q_i = (b·q_i) q_i − b`,
/// plus the free block on `span(q1, q2)⊥`. For `q2 = −q1` this reduces to
/// `b ∈ R q1` and `A q1 = 0`.
pub fn pair_intersection_basis(p1: &Parabolic, p2: &Parabolic) -> Result<ExplicitBasis> {
    let n = check_same_n(&[p1, p2])?;
    if !separation(p1, p2)? {
        return Err(Error::EqualPoints);
    }
    let (q1, q2) = (p1.q().clone(), p2.q().clone());
    let span = Subspace::span(n, &[q1.clone(), q2.clone()], DEFAULT_RANK_TOL)?;
    if span.dim() == 1 {
        let frame = extend_to_basis(std::slice::from_ref(&q1), n);
        let mut elements = vec![AlgebraElement::boost(q1)];
        elements.extend(free_block(&frame[1..]));
        return Ok(ExplicitBasis::new(elements, &frame, 1));
    }
    let frame = extend_to_basis(&[q1.clone(), q2.clone()], n);
    let complement = &frame[2..];
    let solver = SkewSolver::new(&[q1.clone(), q2.clone()], complement)?;
    let sum = &q1 + &q2;
    let b_dirs = extend_to_basis(std::slice::from_ref(&sum), n);
    let mut elements = Vec::with_capacity(pair_dim(n));
    for b in &b_dirs[1..] {
        let y1 = &q1 * b.dot(&q1) - b;
        let y2 = &q2 * b.dot(&q2) - b;
        elements.push(AlgebraElement {
            a: solver.solve(&[y1, y2]),
            b: b.clone(),
        });
    }
    elements.extend(free_block(complement));
    Ok(ExplicitBasis::new(elements, &frame, 2))
}

/// Basis of `p_{q1} ∩ p_{q2} ∩ p_{q3}`. Independent `q`'s: `b ⊥ q_i`,
/// `A q_i = −b`, plus the free block. Dependent `q`'s force `b = 0` and `A`
/// annihilating their span.
pub fn triple_intersection_basis(
    p1: &Parabolic,
    p2: &Parabolic,
    p3: &Parabolic,
) -> Result<ExplicitBasis> {
    let triple = ParabolicTriple::new(p1, p2, p3)?;
    if !triple.distinct {
        return Err(Error::NotDistinct);
    }
    let n = triple.n();
    let qs = triple.q.clone();
    let frame = extend_to_basis(&qs, n);
    if triple.dependent {
        return Ok(ExplicitBasis::new(free_block(&frame[2..]), &frame, 2));
    }
    let complement = &frame[3..];
    let solver = SkewSolver::new(&qs, complement)?;
    let mut elements = Vec::with_capacity(triple_dim(n));
    for b in complement {
        let y = -b;
        elements.push(AlgebraElement {
            a: solver.solve(&[y.clone(), y.clone(), y]),
            b: b.clone(),
        });
    }
    elements.extend(free_block(complement));
    Ok(ExplicitBasis::new(elements, &frame, 3))
}

fn agreed(explicit: usize, numeric: usize, what: &str) -> Result<usize> {
    if explicit == numeric {
        Ok(explicit)
    } else {
        Err(Error::NumericalFailure(format!(
            "{what}: explicit rank {explicit} vs numeric {numeric}"
        )))
    }
}

/// `dim(p_{q1} ∩ p_{q2})`, explicit and numeric routes required to agree.
pub fn pair_intersection_dim(p1: &Parabolic, p2: &Parabolic) -> Result<usize> {
    let explicit = pair_intersection_basis(p1, p2)?.rank();
    let numeric = p1.subspace().intersect(&p2.subspace())?.dim();
    agreed(explicit, numeric, "pair intersection")
}

/// `dim(p_{q1} ∩ p_{q2} ∩ p_{q3})`, explicit and numeric routes required to agree.
pub fn triple_intersection_dim(p1: &Parabolic, p2: &Parabolic, p3: &Parabolic) -> Result<usize> {
    let explicit = triple_intersection_basis(p1, p2, p3)?.rank();
    let numeric = p1
        .subspace()
        .intersect(&p2.subspace())?
        .intersect(&p3.subspace())?
        .dim();
    agreed(explicit, numeric, "triple intersection")
}

/// Three unit vectors with their distinctness and dependence flags.
#[derive(Clone, Debug)]
pub struct ParabolicTriple {
    pub q: [DVector<f64>; 3],
    /// `q_i ≠ q_j` for all pairs.
    pub distinct: bool,
    /// The `q`'s span at most a plane.
    pub dependent: bool,
}

impl ParabolicTriple {
    pub fn new(p1: &Parabolic, p2: &Parabolic, p3: &Parabolic) -> Result<Self> {
        let n = check_same_n(&[p1, p2, p3])?;
        let distinct = separation(p1, p2)? & separation(p2, p3)? & separation(p1, p3)?;
        let q = [p1.q().clone(), p2.q().clone(), p3.q().clone()];
        let dependent = Subspace::span(n, &q, DEFAULT_RANK_TOL)?.dim() < 3;
        Ok(ParabolicTriple {
            q,
            distinct,
            dependent,
        })
    }

    pub fn n(&self) -> usize {
        self.q[0].len()
    }
}

/// The terms of `dim g₀ = dim p₁ + dim(p₂∩p₃) − dim(p₁∩p₂∩p₃)`, all numeric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimIdentity {
    pub total: usize,
    pub first: usize,
    pub pair: usize,
    pub triple: usize,
}

impl DimIdentity {
    pub fn holds(&self) -> bool {
        self.first + self.pair == self.total + self.triple
    }
}

pub fn dim_identity_terms(p1: &Parabolic, p2: &Parabolic, p3: &Parabolic) -> Result<DimIdentity> {
    let n = check_same_n(&[p1, p2, p3])?;
    let (s1, s2, s3) = (p1.subspace(), p2.subspace(), p3.subspace());
    let s23 = s2.intersect(&s3)?;
    Ok(DimIdentity {
        total: algebra_dim(n),
        first: s1.dim(),
        pair: s23.dim(),
        triple: s1.intersect(&s23)?.dim(),
    })
}

pub fn check_dim_identity(p1: &Parabolic, p2: &Parabolic, p3: &Parabolic) -> Result<bool> {
    Ok(dim_identity_terms(p1, p2, p3)?.holds())
}

/// Verdicts of the three sphericality routes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphericalCheck {
    /// The `q`'s are pairwise distinct.
    pub distinct: bool,
    /// `g₀ = p_i + (p_j ∩ p_k)` for all three orderings.
    pub decomposable: bool,
    /// `p₁×p₂×p₃ + diag(g₀) = g₀³`.
    pub direct: bool,
}

impl SphericalCheck {
    pub fn agree(&self) -> bool {
        self.distinct == self.decomposable && self.decomposable == self.direct
    }

    pub fn spherical(&self) -> bool {
        self.distinct && self.decomposable && self.direct
    }
}

pub fn is_spherical_triple(
    p1: &Parabolic,
    p2: &Parabolic,
    p3: &Parabolic,
) -> Result<SphericalCheck> {
    let triple = ParabolicTriple::new(p1, p2, p3)?;
    let (s1, s2, s3) = (p1.subspace(), p2.subspace(), p3.subspace());
    let full = 3 * algebra_dim(triple.n());
    Ok(SphericalCheck {
        distinct: triple.distinct,
        decomposable: triple_sum_decomposable(&s1, &s2, &s3)?,
        direct: direct_triple_rank(&s1, &s2, &s3)? == full,
    })
}

/// The two parabolics containing `R X_u`, namely `p_u` and `p_{−u}`.
pub fn parabolics_above(u: &DVector<f64>) -> Result<[Parabolic; 2]> {
    let p = Parabolic::new(u.clone())?;
    let pair = [p.clone(), p.opposite()];
    let x = AlgebraElement::boost(u.clone());
    if pair.iter().all(|p| in_parabolic(&x, p)) {
        Ok(pair)
    } else {
        Err(Error::NumericalFailure("X_u outside p_(±u)".into()))
    }
}

/// Polar-decomposability and sphericality of all parabolics above the lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConfigClass {
    pub polar: bool,
    pub spherical_all: bool,
}

pub fn classify_config(dirs: &TripleDirections) -> Result<ConfigClass> {
    let above = [
        parabolics_above(dirs.u(0))?,
        parabolics_above(dirs.u(1))?,
        parabolics_above(dirs.u(2))?,
    ];
    let mut spherical_all = true;
    for mask in 0..8usize {
        let pick = |j: usize| &above[j][(mask >> j) & 1];
        let check = is_spherical_triple(pick(0), pick(1), pick(2))?;
        if !check.agree() {
            return Err(Error::NumericalFailure(format!(
                "sphericality routes disagree: {check:?}"
            )));
        }
        spherical_all &= check.spherical();
    }
    Ok(ConfigClass {
        polar: dirs.rank() == 2,
        spherical_all,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{random_unit, trial_rng};

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    fn par(q: DVector<f64>) -> Parabolic {
        Parabolic::new(q).unwrap()
    }

    fn unit(v: DVector<f64>) -> DVector<f64> {
        v.normalize()
    }

    #[test]
    fn membership_by_substitution() {
        let n = 4;
        let p = par(e(n, 2));
        assert!(in_parabolic(&AlgebraElement::boost(e(n, 2)), &p));
        assert!(!in_parabolic(&AlgebraElement::boost(e(n, 0)), &p));
        assert!(in_parabolic(&AlgebraElement::boost(-e(n, 2)), &p));
    }

    #[test]
    fn constraint_rows_match_membership() {
        let mut rng = trial_rng(3, 0);
        let n = 5;
        let p = par(random_unit(n, &mut rng));
        let x = AlgebraElement::from_coords(
            n,
            &DVector::from_fn(algebra_dim(n), |i, _| (i as f64 * 0.37).sin()),
        )
        .unwrap();
        let lhs = p.constraint_rows() * x.coords();
        let q = p.q();
        let rhs = &x.a * q + &x.b - q * x.b.dot(q);
        assert!((lhs - rhs).amax() < 1e-14);
    }

    #[test]
    fn parabolic_basis_sizes() {
        for (n, want) in [(2, 2), (3, 4), (10, 46)] {
            assert_eq!(parabolic_dim(n), want);
            let mut rng = trial_rng(n as u64, 0);
            let p = par(random_unit(n, &mut rng));
            let basis = parabolic_basis(&p).unwrap();
            assert_eq!(basis.len(), want);
            assert_eq!(basis.rank(), want);
            assert!(basis.max_membership_defect(&[&p]) < MEMBERSHIP_TOL);
            assert_eq!(p.subspace().dim(), want);
        }
    }

    #[test]
    fn adapted_rank_matches_full_svd() {
        let mut rng = trial_rng(11, 0);
        for n in 2..7 {
            let ps: Vec<Parabolic> = (0..3).map(|_| par(random_unit(n, &mut rng))).collect();
            for basis in [
                parabolic_basis(&ps[0]).unwrap(),
                pair_intersection_basis(&ps[0], &ps[1]).unwrap(),
                triple_intersection_basis(&ps[0], &ps[1], &ps[2]).unwrap(),
            ] {
                let coords: Vec<DVector<f64>> = basis.elements.iter().map(|x| x.coords()).collect();
                let full = Subspace::span(algebra_dim(n), &coords, DEFAULT_RANK_TOL)
                    .unwrap()
                    .dim();
                assert_eq!(basis.rank(), full);
            }
        }
    }

    #[test]
    fn adapted_rank_detects_duplicates() {
        let p = par(e(4, 0));
        let mut basis = parabolic_basis(&p).unwrap();
        let dup = basis.elements[5].clone();
        basis.elements.push(dup);
        assert_eq!(basis.rank(), parabolic_dim(4));
    }

    #[test]
    fn pair_dims() {
        for (n, want) in [(2, 1), (3, 2), (10, 37)] {
            assert_eq!(pair_dim(n), want);
            let mut rng = trial_rng(n as u64, 1);
            let p1 = par(random_unit(n, &mut rng));
            let p2 = par(random_unit(n, &mut rng));
            assert_eq!(pair_intersection_dim(&p1, &p2).unwrap(), want);
            let basis = pair_intersection_basis(&p1, &p2).unwrap();
            assert!(basis.max_membership_defect(&[&p1, &p2]) < MEMBERSHIP_TOL);
        }
    }

    #[test]
    fn antipodal_pair() {
        for n in [2, 3, 6] {
            let p = par(e(n, 0));
            assert_eq!(
                pair_intersection_dim(&p, &p.opposite()).unwrap(),
                pair_dim(n)
            );
        }
    }

    #[test]
    fn equal_points_rejected() {
        let p = par(e(3, 0));
        assert_eq!(pair_intersection_dim(&p, &p), Err(Error::EqualPoints));
        let q = par(unit(e(3, 0) + e(3, 1) * 1e-10));
        assert!(matches!(
            pair_intersection_dim(&p, &q),
            Err(Error::InvalidConfig(_))
        ));
        let r = par(e(3, 2));
        assert_eq!(triple_intersection_dim(&p, &r, &p), Err(Error::NotDistinct));
    }

    #[test]
    fn triple_dims() {
        assert_eq!(triple_dim(2), 0);
        assert_eq!(triple_dim(5), 3);
        let mut rng = trial_rng(5, 2);
        for n in [2, 3, 5, 9] {
            let ps: Vec<Parabolic> = (0..3).map(|_| par(random_unit(n, &mut rng))).collect();
            assert_eq!(
                triple_intersection_dim(&ps[0], &ps[1], &ps[2]).unwrap(),
                triple_dim(n)
            );
            let basis = triple_intersection_basis(&ps[0], &ps[1], &ps[2]).unwrap();
            assert!(basis.max_membership_defect(&[&ps[0], &ps[1], &ps[2]]) < MEMBERSHIP_TOL);
        }
    }

    #[test]
    fn coplanar_triple_same_dim() {
        let n = 5;
        let q = |t: f64| par(e(n, 1) * t.cos() + e(n, 3) * t.sin());
        let (p1, p2, p3) = (q(0.1), q(1.7), q(4.0));
        let triple = ParabolicTriple::new(&p1, &p2, &p3).unwrap();
        assert!(triple.distinct && triple.dependent);
        assert_eq!(triple_intersection_dim(&p1, &p2, &p3).unwrap(), 3);
        let with_antipode = q(0.1).opposite();
        assert_eq!(
            triple_intersection_dim(&p1, &p2, &with_antipode).unwrap(),
            3
        );
    }

    #[test]
    fn dim_identity_examples() {
        let mut rng = trial_rng(8, 0);
        for (n, terms) in [(2, (3, 2, 1, 0)), (3, (6, 4, 2, 0)), (5, (15, 11, 7, 3))] {
            let ps: Vec<Parabolic> = (0..3).map(|_| par(random_unit(n, &mut rng))).collect();
            let d = dim_identity_terms(&ps[0], &ps[1], &ps[2]).unwrap();
            assert_eq!((d.total, d.first, d.pair, d.triple), terms);
            assert!(d.holds());
        }
    }

    #[test]
    fn sphericality_routes() {
        let mut rng = trial_rng(9, 0);
        let n = 3;
        let ps: Vec<Parabolic> = (0..3).map(|_| par(random_unit(n, &mut rng))).collect();
        let check = is_spherical_triple(&ps[0], &ps[1], &ps[2]).unwrap();
        assert!(check.agree() && check.spherical());

        let check = is_spherical_triple(&ps[0], &ps[0], &ps[2]).unwrap();
        assert!(check.agree() && !check.spherical());

        let n = 4;
        let q = |t: f64| par(e(n, 0) * t.cos() + e(n, 2) * t.sin());
        let check = is_spherical_triple(&q(0.0), &q(2.0), &q(4.0)).unwrap();
        assert!(check.agree() && check.spherical());
    }

    #[test]
    fn parabolics_above_a_line() {
        let n = 4;
        let u = e(n, n - 1);
        let [p, m] = parabolics_above(&u).unwrap();
        assert_eq!(p.q(), &u);
        assert_eq!(m.q(), &-&u);
        assert!(!in_parabolic(&AlgebraElement::boost(u), &par(e(n, 0))));
    }

    #[test]
    fn classification_table() {
        let n = 3;
        let a = e(n, 0);
        let b = e(n, 1);
        let c = unit(e(n, 0) + e(n, 1));
        let d = e(n, 2);
        let cases = [
            ([a.clone(), b.clone(), c.clone()], (true, true)),
            ([a.clone(), a.clone(), b.clone()], (true, false)),
            ([a.clone(), b.clone(), d], (false, true)),
            ([a.clone(), a.clone(), a.clone()], (false, false)),
            ([a.clone(), -a.clone(), b], (true, false)),
        ];
        for ([u1, u2, u3], (polar, spherical_all)) in cases {
            let dirs = TripleDirections::new(u1, u2, u3).unwrap();
            let class = classify_config(&dirs).unwrap();
            assert_eq!((class.polar, class.spherical_all), (polar, spherical_all));
        }
    }
}
