use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use super::kah::sliding_pair;
use super::slide::{Model, SlideCurve};
use super::{extend_to_basis, frame_rotation, TripleDirections};
use crate::error::{Error, Result};
use crate::lorentz::{rotation_in_plane, GroupElement};
use crate::subspace::numerical_rank;

/// Relative tolerance on the point-to-line distances after a fit.
pub const EUCLID_TOL: f64 = 1e-10;

/// Rigid motion `x ↦ R x + T` of `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanMotion {
    pub r: DMatrix<f64>,
    pub t: DVector<f64>,
}

impl EuclideanMotion {
    pub fn identity(n: usize) -> Self {
        Self {
            r: DMatrix::identity(n, n),
            t: DVector::zeros(n),
        }
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.r * x + &self.t
    }

    /// `max_j` distance of the image of `z_j` from the line `R u_j`.
    pub fn line_residual(&self, lines: &[DVector<f64>; 3], z: &[DVector<f64>; 3]) -> f64 {
        lines
            .iter()
            .zip(z)
            .map(|(u, x)| {
                let y = self.apply(x);
                let u = u / u.norm();
                (&y - &u * u.dot(&y)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Distance of `R` from `SO(n)`: orthogonality defect and `|det R - 1|`.
    pub fn rotation_defect(&self) -> f64 {
        let n = self.r.nrows();
        let orth = (self.r.transpose() * &self.r - DMatrix::identity(n, n)).amax();
        orth.max((self.r.determinant() - 1.0).abs())
    }
}

fn rotation2(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

fn angle_of(v: &Vector2<f64>) -> f64 {
    v.y.atan2(v.x)
}

/// Planar rigid motion `(Q, τ)` with `Q p_j + τ ∈ R v_j`.
fn fit_plane(
    p: &[Vector2<f64>; 3],
    v: &[Vector2<f64>; 3],
    scale: f64,
) -> Result<(Matrix2<f64>, Vector2<f64>)> {
    let vd: [DVector<f64>; 3] =
        std::array::from_fn(|j| DVector::from_column_slice(v[j].as_slice()));
    let (a, b, c) = sliding_pair(&vd);
    let d = (p[a] - p[b]).norm();
    if d <= 1e-14 * scale {
        // Move p_a to the origin and turn p_c onto its line.
        let x = p[c] - p[a];
        let q = if x.norm() <= 1e-14 * scale {
            Matrix2::identity()
        } else {
            rotation2(angle_of(&v[c]) - angle_of(&x))
        };
        return Ok((q, -(q * p[a])));
    }

    let curve = SlideCurve::new(Model::Euclidean, v[a].dot(&v[b]), d)?;
    let samples = curve.trace()?;
    let normal = Vector2::new(-v[c].y, v[c].x);
    let base = angle_of(&(p[b] - p[a]));
    let motion = |alpha: f64, beta: f64| {
        let x1 = v[a] * alpha;
        let x2 = v[b] * beta;
        let q = rotation2(angle_of(&(x2 - x1)) - base);
        (q, x1 - q * p[a])
    };
    let crossing = curve.locate_root(&samples, |alpha, beta| {
        let (q, tau) = motion(alpha, beta);
        Ok(normal.dot(&(q * p[c] + tau)))
    })?;
    Ok(motion(crossing.alpha, crossing.beta))
}

fn unit_lines(lines: &[DVector<f64>; 3]) -> Result<[DVector<f64>; 3]> {
    let n = lines[0].len();
    let mut out: [DVector<f64>; 3] = std::array::from_fn(|_| DVector::zeros(n));
    for (j, u) in lines.iter().enumerate() {
        if u.len() != n {
            return Err(Error::AmbientMismatch(n, u.len()));
        }
        let norm = u.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "line {} has no direction",
                j + 1
            )));
        }
        out[j] = u / norm;
    }
    Ok(out)
}

/// Rigid motion `g` of `R^n` with `g(z_j)` on the line `R u_j` through the
/// origin, for lines spanning a plane.
///
/// Lines spanning a single line are accepted only for collinear points; lines
/// spanning three dimensions are rejected, since then some triples of points
/// admit no fit.
pub fn euclid_fit(lines: &[DVector<f64>; 3], z: &[DVector<f64>; 3]) -> Result<EuclideanMotion> {
    let u = unit_lines(lines)?;
    let n = u[0].len();
    for x in z {
        if x.len() != n {
            return Err(Error::AmbientMismatch(n, x.len()));
        }
    }
    let scale = z.iter().map(|x| x.norm()).fold(1.0, f64::max);
    let rank = numerical_rank(&DMatrix::from_columns(&u), super::RANK_TOL);
    let diffs = [&z[1] - &z[0], &z[2] - &z[0]];

    let motion = match rank {
        1 => {
            if numerical_rank(&DMatrix::from_columns(&diffs), EUCLID_TOL) > 1 {
                return Err(Error::InvalidConfig(
                    "single line needs collinear points".into(),
                ));
            }
            let dir = diffs
                .iter()
                .max_by(|x, y| x.norm().total_cmp(&y.norm()))
                .expect("two differences");
            let r = if dir.norm() <= 1e-14 * scale {
                DMatrix::identity(n, n)
            } else {
                let w = dir / dir.norm();
                let target = if w.dot(&u[0]) >= 0.0 {
                    u[0].clone()
                } else {
                    -&u[0]
                };
                rotation_between(&w, &target)
            };
            let t = -(&r * &z[0]);
            EuclideanMotion { r, t }
        }
        2 => {
            let plane = extend_to_basis(&u, n);
            let (e, f) = (&plane[0], &plane[1]);
            let r0 = frame_rotation(&diffs, &[e.clone(), f.clone()], n);
            let coords = |x: &DVector<f64>| Vector2::new(e.dot(x), f.dot(x));
            let p: [Vector2<f64>; 3] = std::array::from_fn(|j| coords(&(&r0 * (&z[j] - &z[0]))));
            let v: [Vector2<f64>; 3] = std::array::from_fn(|j| coords(&u[j]).normalize());
            let (q, tau) = fit_plane(&p, &v, scale)?;
            let basis = DMatrix::from_columns(&[e.clone(), f.clone()]);
            let q_n = DMatrix::from_fn(2, 2, |i, j| q[(i, j)]);
            let lift = &basis * q_n * basis.transpose() + DMatrix::identity(n, n)
                - &basis * basis.transpose();
            let r = lift * r0;
            let t = &basis * DVector::from_column_slice(tau.as_slice()) - &r * &z[0];
            EuclideanMotion { r, t }
        }
        _ => {
            return Err(Error::InvalidConfig(format!(
                "lines span dimension {rank}, fit needs at most 2"
            )))
        }
    };

    let residual = motion.line_residual(&u, z);
    if !(residual < EUCLID_TOL * scale) {
        return Err(Error::NumericalFailure(format!(
            "line residual {residual:e} exceeds {:e}",
            EUCLID_TOL * scale
        )));
    }
    Ok(motion)
}

/// Rotation taking the unit `a` to the unit `b` in their common plane.
fn rotation_between(a: &DVector<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    let n = a.len();
    let cos = a.dot(b);
    let w = b - a * cos;
    let wn = w.norm();
    if wn <= 1e-15 {
        return DMatrix::identity(n, n);
    }
    rotation_in_plane(a, &(w / wn), wn.atan2(cos))
}

/// `Z_j = Ad(k₀)(X_j u_j) + T`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfinitesimalPolar {
    pub k0: GroupElement,
    pub x: [f64; 3],
    pub t: DVector<f64>,
    pub residual: f64,
}

impl InfinitesimalPolar {
    /// `Ad(k₀)(X_j u_j) + T` for each `j`.
    pub fn recompose(&self, dirs: &TripleDirections) -> [DVector<f64>; 3] {
        let r = self.k0.spatial_block();
        std::array::from_fn(|j| &r * (dirs.u(j) * self.x[j]) + &self.t)
    }
}

/// Infinitesimal polar decomposition of `(Z₁, Z₂, Z₃) ∈ s₀³`, via the rigid
/// motion fitting the points `Z_j` to the lines `R u_j`.
pub fn infinitesimal_polar_decompose(
    z: &[DVector<f64>; 3],
    dirs: &TripleDirections,
) -> Result<InfinitesimalPolar> {
    let rank = dirs.rank();
    if rank != 2 {
        return Err(Error::InvalidConfig(format!(
            "directions span dimension {rank}, decomposition needs 2"
        )));
    }
    let g = euclid_fit(dirs.dirs(), z)?;
    let rt = g.r.transpose();
    let x: [f64; 3] = std::array::from_fn(|j| dirs.u(j).dot(&g.apply(&z[j])));
    let mut out = InfinitesimalPolar {
        k0: GroupElement::rotation(&rt),
        x,
        t: -(&rt * &g.t),
        residual: 0.0,
    };
    out.residual = out
        .recompose(dirs)
        .iter()
        .zip(z)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let scale = z.iter().map(|v| v.norm()).fold(1.0, f64::max);
    if !(out.residual < 1e-9 * scale) {
        return Err(Error::NumericalFailure(format!(
            "infinitesimal residual {:e}",
            out.residual
        )));
    }
    Ok(out)
}
