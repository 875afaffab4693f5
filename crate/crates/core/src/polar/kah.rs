use nalgebra::{DMatrix, DVector};

use super::slide::{Model, SlideCurve, DEGENERATE_LENGTH};
use super::{frame_rotation, nearest_rotation, TripleDirections};
use crate::error::{Error, Result};
use crate::lorentz::{
    algebra_dim, dist, exp_alg, exp_boost, geodesic_point, log_geodesic, lorentz_form,
    pair_isometry, plane_reduction, rotation_in_plane, signed_distance_to_geodesic,
    transvection_to, AlgebraElement, GroupElement, HPoint,
};

/// Recomposition tolerance for [`kah_decompose`].
pub const KAH_TOL: f64 = 1e-8;

/// Record of the sliding search that located `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlideDiagnostics {
    /// Index pair of the sliding lines and of the third line.
    pub lines: (usize, usize, usize),
    pub d: f64,
    pub s_root: f64,
    /// Signed distance of the third point to its line at the crossing.
    pub f_root: f64,
    pub f_start: f64,
    pub f_end: f64,
    pub samples: usize,
}

/// `g_j = k_j · exp(t_j X_{u_j}) · h` for `j = 1, 2, 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct KahResult {
    pub k: [GroupElement; 3],
    pub t: [f64; 3],
    pub h: GroupElement,
    /// `max_j |g_j - k_j a_j h|` (Frobenius).
    pub residual: f64,
    /// Distance of the raw `g_j h⁻¹ a_j⁻¹` from `K₀` before projection.
    pub k_defect: f64,
    /// `None` when no sliding was needed (coincident points).
    pub slide: Option<SlideDiagnostics>,
}

impl KahResult {
    pub fn a(&self, dirs: &TripleDirections) -> [GroupElement; 3] {
        std::array::from_fn(|j| exp_boost(&(dirs.u(j) * self.t[j])))
    }

    pub fn recompose(&self, dirs: &TripleDirections) -> [GroupElement; 3] {
        let a = self.a(dirs);
        std::array::from_fn(|j| &(&self.k[j] * &a[j]) * &self.h)
    }

    pub fn max_deviation(&self, g: &[GroupElement; 3], dirs: &TripleDirections) -> f64 {
        self.recompose(dirs)
            .iter()
            .zip(g)
            .map(|(x, y)| x.distance(y))
            .fold(0.0, f64::max)
    }
}

/// Embeds an `SO_e(2,1)` element acting on coordinates `(n-2, n-1, n)`.
fn embed_plane(q: &GroupElement, n: usize) -> GroupElement {
    let mut m = DMatrix::identity(n + 1, n + 1);
    m.view_mut((n - 2, n - 2), (3, 3)).copy_from(q.matrix());
    GroupElement::from_matrix_unchecked(m)
}

fn restrict_plane(p: &HPoint) -> HPoint {
    let n = p.n();
    let x = p.coords();
    HPoint::new_unchecked(DVector::from_vec(vec![x[n - 2], x[n - 1], x[n]]))
}

fn rot90(v: &DVector<f64>) -> DVector<f64> {
    DVector::from_vec(vec![-v[1], v[0]])
}

/// Pair of lines with the largest angle between them, and the remaining index.
pub(crate) fn sliding_pair(v: &[DVector<f64>; 3]) -> (usize, usize, usize) {
    let sin = |a: usize, b: usize| (v[a][0] * v[b][1] - v[a][1] * v[b][0]).abs();
    let mut best = (0, 1, 2);
    for cand in [(0, 2, 1), (1, 2, 0)] {
        if sin(cand.0, cand.1) > sin(best.0, best.1) {
            best = cand;
        }
    }
    best
}

/// `q ∈ SO_e(2,1)` with `q·w_j` on the geodesic of direction `v_j`.
fn solve_plane(
    w: &[HPoint; 3],
    v: &[DVector<f64>; 3],
) -> Result<(GroupElement, Option<SlideDiagnostics>)> {
    let (a, b, c) = sliding_pair(v);
    let d = dist(&w[a], &w[b]);
    if d < DEGENERATE_LENGTH {
        // Move w_a to z₀, then turn w_c onto its line.
        let t = transvection_to(&w[a]).inverse();
        let x = t.act(&w[c]).spatial();
        if x.norm() < 1e-14 {
            return Ok((t, None));
        }
        let angle = v[c][1].atan2(v[c][0]) - x[1].atan2(x[0]);
        let r = |angle: f64| {
            GroupElement::rotation(&rotation_in_plane(
                &DVector::from_vec(vec![1.0, 0.0]),
                &DVector::from_vec(vec![0.0, 1.0]),
                angle,
            ))
        };
        return Ok((&r(angle) * &t, None));
    }

    let curve = SlideCurve::new(Model::Hyperbolic, v[a].dot(&v[b]), d)?;
    let samples = curve.trace()?;
    let normal = rot90(&v[c]);
    let motion = |alpha: f64, beta: f64| -> Result<GroupElement> {
        let x1 = geodesic_point(&v[a], alpha)?;
        let x2 = geodesic_point(&v[b], beta)?;
        pair_isometry(&w[a], &w[b], &x1, &x2, None)
    };
    let crossing = curve.locate_root(&samples, |alpha, beta| {
        Ok(signed_distance_to_geodesic(
            &motion(alpha, beta)?.act(&w[c]),
            &normal,
        ))
    })?;
    let q = motion(crossing.alpha, crossing.beta)?;
    let diag = SlideDiagnostics {
        lines: (a, b, c),
        d: curve.length(),
        s_root: crossing.s,
        f_root: crossing.value,
        f_start: crossing.f_start,
        f_end: crossing.f_end,
        samples: samples.len(),
    };
    Ok((q, Some(diag)))
}

/// First-order correction of a nearly Lorentz matrix: `M (I - E/2)` with
/// `E = J Mᵀ J M - I`.
fn restore_lorentz(g: &GroupElement) -> GroupElement {
    let n = g.n();
    let j = lorentz_form(n);
    let mut m = g.matrix().clone();
    for _ in 0..2 {
        let e = &j * m.transpose() * &j * &m - DMatrix::identity(n + 1, n + 1);
        m = &m - &m * e * 0.5;
    }
    GroupElement::from_matrix_unchecked(m)
}

/// Components of `h·z_j` normal to the lines, stacked.
fn line_defects(h: &GroupElement, z: &[HPoint; 3], dirs: &TripleDirections) -> DVector<f64> {
    let n = dirs.n();
    let mut out = DVector::zeros(3 * n);
    for (j, zj) in z.iter().enumerate() {
        let y = h.act(zj).spatial();
        let u = dirs.u(j);
        out.rows_mut(j * n, n).copy_from(&(&y - u * u.dot(&y)));
    }
    out
}

/// Gauss-Newton refinement of `h` on the line conditions over `so(n,1)`.
///
/// The reduction composes isometries whose entries grow like `e^dist` while
/// `h` itself may be small, so the assembled `h` carries cancellation error;
/// minimum-norm steps `h ← exp(X) h` remove it. Steps are kept only while
/// the defect decreases.
fn polish(mut h: GroupElement, z: &[HPoint; 3], dirs: &TripleDirections) -> GroupElement {
    let n = dirs.n();
    let dim = algebra_dim(n);
    let generators: Vec<DMatrix<f64>> = (0..dim)
        .map(|i| {
            let mut c = DVector::zeros(dim);
            c[i] = 1.0;
            AlgebraElement::from_coords(n, &c)
                .expect("coordinate generator")
                .to_matrix()
        })
        .collect();
    let mut defect = line_defects(&h, z, dirs);
    for _ in 0..5 {
        let worst = defect.amax();
        if worst == 0.0 {
            break;
        }
        let mut jac = DMatrix::zeros(3 * n, dim);
        for (j, zj) in z.iter().enumerate() {
            let y = h.act(zj);
            let u = dirs.u(j);
            for (i, gen) in generators.iter().enumerate() {
                let v = (gen * y.coords()).rows(0, n).into_owned();
                jac.view_mut((j * n, i), (n, 1))
                    .copy_from(&(&v - u * u.dot(&v)));
            }
        }
        let svd = jac.svd(true, true);
        let cutoff = 1e-12 * svd.singular_values.max();
        let Ok(step) = svd.solve(&-&defect, cutoff) else {
            break;
        };
        let Ok(x) = AlgebraElement::from_coords(n, &step) else {
            break;
        };
        let candidate = &exp_alg(&x) * &h;
        let cd = line_defects(&candidate, z, dirs);
        if cd.amax() < worst {
            h = candidate;
            defect = cd;
        } else {
            break;
        }
    }
    h
}

/// Polar decomposition `g_j = k_j·exp(t_j X_{u_j})·h` of a triple in
/// `SO_e(n,1)³`, for directions spanning a plane.
///
/// Reduces to finding `h` with `h·z_j` on the geodesic of `u_j`, where
/// `z_j = g_j⁻¹·z₀`: the directions are rotated into the standard plane, the
/// points are moved into the standard `H²`, and there a segment joining two of
/// the points slides along its two lines until the third point meets its own.
pub fn kah_decompose(g: &[GroupElement; 3], dirs: &TripleDirections) -> Result<KahResult> {
    let n = dirs.n();
    for gj in g {
        if gj.n() != n {
            return Err(Error::AmbientMismatch(n, gj.n()));
        }
    }
    let rank = dirs.rank();
    if rank != 2 {
        return Err(Error::InvalidConfig(format!(
            "directions span dimension {rank}, decomposition needs 2"
        )));
    }

    let z0 = HPoint::origin(n);
    let z: [HPoint; 3] = std::array::from_fn(|j| g[j].inverse().act(&z0));

    let e = |i: usize| {
        let mut x = DVector::zeros(n);
        x[i] = 1.0;
        x
    };
    let r0 = frame_rotation(dirs.dirs(), &[e(n - 2), e(n - 1)], n);
    let k0 = GroupElement::rotation(&r0);
    let v: [DVector<f64>; 3] = std::array::from_fn(|j| {
        let x = &r0 * dirs.u(j);
        DVector::from_vec(vec![x[n - 2], x[n - 1]]).normalize()
    });

    let p = plane_reduction(&z[0], &z[1], &z[2]);
    let w: [HPoint; 3] = std::array::from_fn(|j| restrict_plane(&p.act(&z[j])));
    let (q3, slide) = solve_plane(&w, &v)?;
    let h = &(&k0.inverse() * &embed_plane(&q3, n)) * &p;
    // Re-projection onto the group helps when `h` is small and hurts when its
    // entries are large; keep whichever factorization recomposes better.
    let candidates = [polish(restore_lorentz(&h), &z, dirs), polish(h, &z, dirs)];
    let mut best: Option<KahResult> = None;
    let mut last_err = None;
    for h in candidates {
        match extract(g, &z, dirs, h, slide) {
            Ok(r) if best.as_ref().is_none_or(|b| r.residual < b.residual) => best = Some(r),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    let mut out = match (best, last_err) {
        (Some(r), _) => r,
        (None, Some(e)) => return Err(e),
        (None, None) => unreachable!("two candidates"),
    };
    if out.residual > REFINE_TRIGGER {
        out = refine(g, dirs, out);
    }
    if !(out.residual < KAH_TOL) {
        return Err(Error::NumericalFailure(format!(
            "recomposition residual {:e} (K defect {:e}, slide {:?})",
            out.residual, out.k_defect, out.slide
        )));
    }
    Ok(out)
}

/// Residual above which [`refine`] runs.
const REFINE_TRIGGER: f64 = 1e-11;

/// Gauss-Newton on `g_j = k_j a_j h` itself, with left-trivialized updates
/// `k_j ← k_j exp(κ_j)`, `t_j ← t_j + τ_j`, `h ← exp(η) h`.
///
/// `h` is located through `z_j = g_j⁻¹·z₀`, whose rounding is amplified by
/// `|g_j|·|a_j|` when `k_j` is read off `g_j h⁻¹ a_j⁻¹`; iterating on the
/// recomposition residual brings it back to the rounding level of the
/// factors. Steps are kept only while the residual decreases.
fn refine(g: &[GroupElement; 3], dirs: &TripleDirections, start: KahResult) -> KahResult {
    let n = dirs.n();
    let mut res = start.clone();
    res.h = reproject(&start.h);
    res.residual = res.max_deviation(g, dirs);
    let dim = algebra_dim(n);
    let dk = n * (n - 1) / 2;
    let size = (n + 1) * (n + 1);
    let generators: Vec<DMatrix<f64>> = (0..dim)
        .map(|i| {
            let mut c = DVector::zeros(dim);
            c[i] = 1.0;
            AlgebraElement::from_coords(n, &c)
                .expect("coordinate generator")
                .to_matrix()
        })
        .collect();
    let boosts: Vec<DMatrix<f64>> = (0..3)
        .map(|j| AlgebraElement::boost(dirs.u(j).clone()).to_matrix())
        .collect();
    let flat = |m: &DMatrix<f64>| DVector::from_column_slice(m.as_slice());
    for _ in 0..4 {
        let a = res.a(dirs);
        let mut rhs = DVector::zeros(3 * size);
        let mut jac = DMatrix::zeros(3 * size, 3 * dk + 3 + dim);
        for j in 0..3 {
            let ka = &res.k[j] * &a[j];
            let r = g[j].matrix() - ka.matrix() * res.h.matrix();
            rhs.rows_mut(j * size, size).copy_from(&flat(&r));
            let ah = a[j].matrix() * res.h.matrix();
            // The first `dk` coordinates of `so(n,1)` are the `so(n)` block.
            for (i, gen) in generators[..dk].iter().enumerate() {
                let d = res.k[j].matrix() * gen * &ah;
                jac.view_mut((j * size, j * dk + i), (size, 1))
                    .copy_from(&flat(&d));
            }
            let d = ka.matrix() * &boosts[j] * res.h.matrix();
            jac.view_mut((j * size, 3 * dk + j), (size, 1))
                .copy_from(&flat(&d));
            for (i, gen) in generators.iter().enumerate() {
                let d = ka.matrix() * gen * res.h.matrix();
                jac.view_mut((j * size, 3 * dk + 3 + i), (size, 1))
                    .copy_from(&flat(&d));
            }
        }
        let svd = jac.svd(true, true);
        let cutoff = 1e-12 * svd.singular_values.max();
        let Ok(step) = svd.solve(&rhs, cutoff) else {
            break;
        };
        let mut next = res.clone();
        for j in 0..3 {
            let mut c = DVector::zeros(dim);
            c.rows_mut(0, dk).copy_from(&step.rows(j * dk, dk));
            let Ok(kappa) = AlgebraElement::from_coords(n, &c) else {
                return res;
            };
            let rot = (res.k[j].matrix() * exp_alg(&kappa).matrix())
                .view((0, 0), (n, n))
                .into_owned();
            next.k[j] = GroupElement::rotation(&nearest_rotation(&rot));
            next.t[j] += step[3 * dk + j];
        }
        let Ok(eta) = AlgebraElement::from_coords(n, &step.rows(3 * dk + 3, dim).into_owned())
        else {
            return res;
        };
        next.h = &exp_alg(&eta) * &res.h;
        next.residual = next.max_deviation(g, dirs);
        if next.residual < res.residual {
            res = next;
        } else {
            break;
        }
    }
    if res.residual < start.residual {
        res
    } else {
        start
    }
}

/// Nearest exact isometry in Cartan form: the transvection to `h·z₀` times
/// the rotation closest to the remainder.
fn reproject(h: &GroupElement) -> GroupElement {
    let n = h.n();
    let y = h.act(&HPoint::origin(n));
    let y = HPoint::from_spatial(&y.spatial());
    let t = transvection_to(&y);
    let rest = &t.inverse() * h;
    &t * &GroupElement::rotation(&nearest_rotation(&rest.spatial_block()))
}

/// Reads `t_j` off `h·z_j` and sets `k_j` to the rotation closest to
/// `g_j h⁻¹ a_j⁻¹`.
fn extract(
    g: &[GroupElement; 3],
    z: &[HPoint; 3],
    dirs: &TripleDirections,
    h: GroupElement,
    slide: Option<SlideDiagnostics>,
) -> Result<KahResult> {
    let n = dirs.n();
    let h_inv = h.inverse();
    let mut t = [0.0; 3];
    let mut k: [GroupElement; 3] = std::array::from_fn(|_| GroupElement::identity(n));
    let mut k_defect: f64 = 0.0;
    for j in 0..3 {
        let y = h.act(&z[j]);
        // A point slightly off its line is left to `refine`; the final
        // residual check decides.
        let tau = match log_geodesic(dirs.u(j), &y) {
            Ok(tau) => tau,
            Err(Error::OffGeodesic { .. }) => dirs.u(j).dot(&y.spatial()).asinh(),
            Err(err) => return Err(err),
        };
        t[j] = -tau;
        let a_inv = exp_boost(&(dirs.u(j) * tau));
        let raw = &(&g[j] * &h_inv) * &a_inv;
        let kj = GroupElement::rotation(&nearest_rotation(&raw.spatial_block()));
        k_defect = k_defect.max(raw.distance(&kj));
        k[j] = kj;
    }
    let mut out = KahResult {
        k,
        t,
        h,
        residual: 0.0,
        k_defect,
        slide,
    };
    out.residual = out.max_deviation(g, dirs);
    Ok(out)
}
