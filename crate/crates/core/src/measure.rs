//! Invariant measure on the triple space in polar coordinates
//! `(k₁a_{t₁}, k₂a_{t₂}, k₃b_s)H`, checked against the closed-form density by
//! finite differences of the map into `G₀ × G₀`.
//!
//! `a_t = exp(t X_{e_n})`, `b_s = exp(s X_{e_1})`. Only `n ∈ {2, 3}` give a
//! square Jacobian; larger `n` is rejected as unsupported.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::lorentz::{algebra_dim, exp_alg, exp_boost, random_k0, AlgebraElement, GroupElement};

/// Finite-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Density below which a sample point counts as singular.
pub const SINGULAR_DENSITY: f64 = 1e-8;
/// Reciprocal condition number below which the step is refined.
const POOR_CONDITIONING: f64 = 1e-6;
const K0_TOL: f64 = 1e-9;

/// A point `(k₁, k₂, k₃, t₁, t₂, s)` of the polar coordinate domain.
#[derive(Clone, Debug)]
pub struct PolarCoordinate {
    pub k: [GroupElement; 3],
    pub t1: f64,
    pub t2: f64,
    pub s: f64,
}

impl PolarCoordinate {
    pub fn new(k: [GroupElement; 3], t1: f64, t2: f64, s: f64) -> Result<Self> {
        let n = k[0].n();
        for kj in &k {
            if kj.n() != n {
                return Err(Error::AmbientMismatch(n, kj.n()));
            }
            if !kj.fixes_origin(K0_TOL) {
                return Err(Error::InvalidConfig("k does not fix the origin".into()));
            }
        }
        Ok(PolarCoordinate { k, t1, t2, s })
    }

    pub fn identity(n: usize) -> Self {
        let e = GroupElement::identity(n);
        PolarCoordinate {
            k: [e.clone(), e.clone(), e],
            t1: 0.0,
            t2: 0.0,
            s: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.k[0].n()
    }
}

/// Random point with `|t_j| ≤ 1.5`, `|t₁ − t₂| ≥ 0.1` and `s ∈ [0.1, 1.5]`.
pub fn random_coordinate<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PolarCoordinate {
    let k = [random_k0(n, rng), random_k0(n, rng), random_k0(n, rng)];
    let (t1, t2) = loop {
        let t1 = rng.random_range(-1.5..1.5);
        let t2 = rng.random_range(-1.5..1.5);
        if f64::abs(t1 - t2) >= 0.1 {
            break (t1, t2);
        }
    };
    let s = rng.random_range(0.1..1.5);
    PolarCoordinate { k, t1, t2, s }
}

/// `|sinh^{n−1}(t₁ − t₂) sinh^{n−2}(s) cosh(s)|` with `sinh⁰ ≡ 1`.
pub fn jacobian_density(n: usize, t1: f64, t2: f64, s: f64) -> f64 {
    let p = |x: f64, k: usize| if k == 0 { 1.0 } else { x.sinh().powi(k as i32) };
    (p(t1 - t2, n.saturating_sub(1)) * p(s, n.saturating_sub(2)) * s.cosh()).abs()
}

fn axis(n: usize, i: usize, t: f64) -> GroupElement {
    let mut b = DVector::zeros(n);
    b[i] = t;
    exp_boost(&b)
}

/// `(k₁ a_{t₁} b_{−s} k₃⁻¹, k₂ a_{t₂} b_{−s} k₃⁻¹)`.
pub fn coord_map(c: &PolarCoordinate) -> (GroupElement, GroupElement) {
    let n = c.n();
    let tail = &axis(n, 0, -c.s) * &c.k[2].inverse();
    let g1 = &(&c.k[0] * &axis(n, n - 1, c.t1)) * &tail;
    let g2 = &(&c.k[1] * &axis(n, n - 1, c.t2)) * &tail;
    (g1, g2)
}

/// Orthonormal basis of `so(n)` for `−tr(XY)`.
fn k0_frame(n: usize) -> Vec<AlgebraElement> {
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut a = DMatrix::zeros(n, n);
            a[(i, j)] = w;
            a[(j, i)] = -w;
            out.push(AlgebraElement {
                a,
                b: DVector::zeros(n),
            });
        }
    }
    out
}

/// `log(I + E)` by its power series, for small `E`.
fn log_near_identity(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let e = m - DMatrix::identity(m.nrows(), m.ncols());
    let size = e.norm();
    if size > 0.5 {
        return Err(Error::NumericalFailure(format!(
            "finite-difference step too large ({size:e})"
        )));
    }
    let mut power = e.clone();
    let mut out = e.clone();
    for k in 2..60 {
        power = &power * &e;
        let term = &power / k as f64;
        if k % 2 == 0 {
            out -= &term;
        } else {
            out += &term;
        }
        if term.norm() < 1e-18 * size.max(1e-300) {
            break;
        }
    }
    Ok(out)
}

/// Displaced coordinate along domain direction `dir` by `h`.
fn displaced(c: &PolarCoordinate, dir: usize, h: f64, frame: &[AlgebraElement]) -> PolarCoordinate {
    let mut d = c.clone();
    let dk = frame.len();
    if dir < 3 * dk {
        let (j, a) = (dir / dk, dir % dk);
        d.k[j] = &c.k[j] * &exp_alg(&frame[a].scale(h));
    } else {
        match dir - 3 * dk {
            0 => d.t1 += h,
            1 => d.t2 += h,
            _ => d.s += h,
        }
    }
    d
}

/// Left-trivialized derivative of the coordinate map, one column per domain
/// direction, rows in `so(n,1)` coordinates of both factors.
fn differential(c: &PolarCoordinate, h: f64) -> Result<DMatrix<f64>> {
    let n = c.n();
    let frame = k0_frame(n);
    let cols = 3 * frame.len() + 3;
    let d = algebra_dim(n);
    let (g1, g2) = coord_map(c);
    let (g1i, g2i) = (g1.inverse(), g2.inverse());
    let mut out = DMatrix::zeros(2 * d, cols);
    for dir in 0..cols {
        let mut col = DVector::zeros(2 * d);
        for (sign, step) in [(1.0, h), (-1.0, -h)] {
            let (p1, p2) = coord_map(&displaced(c, dir, step, &frame));
            let l1 = AlgebraElement::from_matrix(&log_near_identity((&g1i * &p1).matrix())?)?;
            let l2 = AlgebraElement::from_matrix(&log_near_identity((&g2i * &p2).matrix())?)?;
            col.rows_mut(0, d).axpy(sign, &l1.coords(), 1.0);
            col.rows_mut(d, d).axpy(sign, &l2.coords(), 1.0);
        }
        out.set_column(dir, &(col / (2.0 * h)));
    }
    Ok(out)
}

fn reciprocal_condition(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.max();
    if max == 0.0 {
        0.0
    } else {
        sv.min() / max
    }
}

/// `|det D|` of the coordinate map at `c`. Central differences with step
/// `step`, refined by Richardson extrapolation with `step/2` when `D` is
/// poorly conditioned.
pub fn numeric_jacobian(c: &PolarCoordinate, step: f64) -> Result<f64> {
    let n = c.n();
    if !(2..=3).contains(&n) {
        return Err(Error::Unsupported(format!(
            "measure verification needs n in {{2, 3}}, got {n}"
        )));
    }
    let coarse = differential(c, step)?;
    if reciprocal_condition(&coarse) >= POOR_CONDITIONING {
        return Ok(coarse.determinant().abs());
    }
    let fine = differential(c, 0.5 * step)?;
    Ok(((4.0 * fine - coarse) / 3.0).determinant().abs())
}

/// `|det D| / J`, a constant over the domain.
pub fn numeric_jacobian_ratio(c: &PolarCoordinate, step: f64) -> Result<f64> {
    let n = c.n();
    if !(2..=3).contains(&n) {
        return Err(Error::Unsupported(format!(
            "measure verification needs n in {{2, 3}}, got {n}"
        )));
    }
    let density = jacobian_density(n, c.t1, c.t2, c.s);
    if density < SINGULAR_DENSITY {
        return Err(Error::SingularPoint(density));
    }
    Ok(numeric_jacobian(c, step)? / density)
}

/// Mean and relative spread of the ratio over samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioStats {
    pub mean: f64,
    pub std_dev: f64,
    pub samples: usize,
}

impl RatioStats {
    pub fn from_samples(ratios: &[f64]) -> Self {
        let m = ratios.len().max(1) as f64;
        let mean = ratios.iter().sum::<f64>() / m;
        let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / m;
        RatioStats {
            mean,
            std_dev: var.sqrt(),
            samples: ratios.len(),
        }
    }

    pub fn relative_spread(&self) -> f64 {
        self.std_dev / self.mean.abs()
    }
}
