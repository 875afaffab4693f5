use std::f64::consts::PI;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::lorentz::{dist, geodesic_point, HPoint};

/// Path length below which a segment is treated as a single point.
pub(crate) const DEGENERATE_LENGTH: f64 = 1e-9;

/// Base continuation step, 1/256 of the parameter interval `[-1, 1]`.
const BASE_STEP: f64 = 2.0 / 256.0;
const MIN_STEP: f64 = 1e-12;
const MAX_NEWTON: usize = 200;

/// Two-point geometry in which a segment slides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Model {
    Hyperbolic,
    Euclidean,
}

impl Model {
    /// `phi(d)` with `phi(d) = ((1+c) phi(α-β) + (1-c) phi(α+β)) / 2` for the
    /// points at signed positions `α`, `β` on lines through the origin whose
    /// directions have inner product `c`.
    fn phi(self, x: f64) -> f64 {
        match self {
            Model::Hyperbolic => {
                let h = (0.5 * x).sinh();
                2.0 * h * h
            }
            Model::Euclidean => 0.5 * x * x,
        }
    }

    fn dphi(self, x: f64) -> f64 {
        match self {
            Model::Hyperbolic => x.sinh(),
            Model::Euclidean => x,
        }
    }
}

/// Level set `{(α, β) : distance = d}` for two lines through the origin.
///
/// The set is star-shaped about `(0, 0)`: along each ray `r(cos θ, sin θ)` the
/// distance is convex and increasing in `r`, so it has exactly one point.
/// The parameter `s ∈ [-1, 1]` maps to `θ = π(1 - s)/2`, which runs from
/// `(-d, 0)` through `(0, d)` to `(d, 0)` with `β ≥ 0` throughout.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SlideCurve {
    model: Model,
    c: f64,
    d: f64,
}

impl SlideCurve {
    pub(crate) fn new(model: Model, c: f64, d: f64) -> Result<Self> {
        if !(c.abs() < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "sliding lines coincide (cosine {c})"
            )));
        }
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::InvalidConfig(format!("segment length {d}")));
        }
        Ok(Self { model, c, d })
    }

    pub(crate) fn length(&self) -> f64 {
        self.d
    }

    fn direction(s: f64) -> (f64, f64) {
        if s <= -1.0 {
            (-1.0, 0.0)
        } else if s >= 1.0 {
            (1.0, 0.0)
        } else {
            let (sin, cos) = (0.5 * PI * (1.0 - s)).sin_cos();
            (cos, sin.max(0.0))
        }
    }

    fn residual(&self, r: f64, k1: f64, k2: f64) -> (f64, f64) {
        let m = self.model;
        let (c, d) = (self.c, self.d);
        let h = 0.5 * ((1.0 + c) * m.phi(r * k1) + (1.0 - c) * m.phi(r * k2)) - m.phi(d);
        let dh = 0.5 * ((1.0 + c) * m.dphi(r * k1) * k1 + (1.0 - c) * m.dphi(r * k2) * k2);
        (h, dh)
    }

    /// Radius along the ray at `s`, by safeguarded Newton from `guess`.
    /// Returns the radius and the number of iterations used.
    fn radius(&self, s: f64, guess: f64) -> Result<(f64, usize)> {
        if self.d == 0.0 {
            return Ok((0.0, 0));
        }
        let (cos, sin) = Self::direction(s);
        let (k1, k2) = (cos - sin, cos + sin);
        let mut lo = 0.0;
        let mut hi = guess.max(self.d).max(f64::MIN_POSITIVE);
        while self.residual(hi, k1, k2).0 < 0.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::NumericalFailure(format!(
                    "no bracket for the sliding radius at s = {s}"
                )));
            }
        }
        let mut r = guess.clamp(lo, hi);
        for iter in 1..=MAX_NEWTON {
            let (h, dh) = self.residual(r, k1, k2);
            if h == 0.0 {
                return Ok((r, iter));
            }
            if h < 0.0 {
                lo = r;
            } else {
                hi = r;
            }
            let newton = r - h / dh;
            let next = if dh > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - r).abs() <= 4.0 * f64::EPSILON * r.max(1e-300)
                || hi - lo <= f64::EPSILON * hi
            {
                return Ok((next, iter));
            }
            r = next;
        }
        Err(Error::NumericalFailure(format!(
            "sliding radius did not converge at s = {s}"
        )))
    }

    /// Signed positions `(α, β)` on the two lines at parameter `s`.
    pub(crate) fn positions(&self, s: f64, guess: f64) -> Result<(f64, f64)> {
        let (r, _) = self.radius(s, guess)?;
        let (cos, sin) = Self::direction(s);
        Ok((r * cos, r * sin))
    }

    /// Samples `(s, r)` from `s = -1` to `s = 1` by predictor-corrector
    /// continuation with step halving.
    pub(crate) fn trace(&self) -> Result<Vec<(f64, f64)>> {
        let mut out = vec![(-1.0, self.d)];
        if self.d == 0.0 {
            out.push((1.0, 0.0));
            return Ok(out);
        }
        let mut s = -1.0;
        let mut step = BASE_STEP;
        while s < 1.0 {
            let target = (s + step).min(1.0);
            let predicted = match out.len() {
                0 | 1 => out[out.len() - 1].1,
                len => {
                    let (s0, r0) = out[len - 2];
                    let (s1, r1) = out[len - 1];
                    r1 + (r1 - r0) / (s1 - s0) * (target - s1)
                }
            }
            .max(0.0);
            let accepted = match self.radius(target, predicted) {
                Ok((r, iters)) => {
                    let jump = (r - predicted).abs();
                    (iters <= 40 && jump <= 0.25 * self.d.max(r)).then_some(r)
                }
                Err(_) => None,
            };
            match accepted {
                Some(r) => {
                    out.push((target, r));
                    s = target;
                    step = (2.0 * step).min(BASE_STEP);
                }
                None => {
                    step *= 0.5;
                    if step < MIN_STEP {
                        return Err(Error::ContinuationStall { s, step });
                    }
                }
            }
        }
        Ok(out)
    }

    /// First zero of `f` along the traced samples, refined by bisection.
    ///
    /// `f` receives the positions `(α, β)`. Returns the crossing together
    /// with `f` at both ends of the path.
    pub(crate) fn locate_root<F>(&self, samples: &[(f64, f64)], mut f: F) -> Result<Crossing>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        let mut eval = |s: f64, guess: f64| -> Result<(f64, f64, f64)> {
            let (a, b) = self.positions(s, guess)?;
            Ok((a, b, f(a, b)?))
        };
        let (s_first, r_first) = samples[0];
        let (s_last, r_last) = samples[samples.len() - 1];
        let f_start = eval(s_first, r_first)?.2;
        let f_end = eval(s_last, r_last)?.2;

        let mut prev = (s_first, r_first, f_start);
        for &(s, r) in &samples[1..] {
            let fs = eval(s, r)?.2;
            if prev.2 == 0.0 {
                let (alpha, beta) = self.positions(prev.0, prev.1)?;
                return Ok(Crossing {
                    s: prev.0,
                    alpha,
                    beta,
                    value: 0.0,
                    f_start,
                    f_end,
                });
            }
            if prev.2.signum() != fs.signum() {
                return self.bisect(prev, (s, r, fs), &mut eval, f_start, f_end);
            }
            prev = (s, r, fs);
        }
        if prev.2 == 0.0 {
            let (alpha, beta) = self.positions(prev.0, prev.1)?;
            return Ok(Crossing {
                s: prev.0,
                alpha,
                beta,
                value: 0.0,
                f_start,
                f_end,
            });
        }
        Err(Error::NumericalFailure(format!(
            "no sign change along the sliding path (f(-1) = {f_start:e}, f(1) = {f_end:e})"
        )))
    }

    fn bisect<E>(
        &self,
        mut lo: (f64, f64, f64),
        mut hi: (f64, f64, f64),
        eval: &mut E,
        f_start: f64,
        f_end: f64,
    ) -> Result<Crossing>
    where
        E: FnMut(f64, f64) -> Result<(f64, f64, f64)>,
    {
        // Bisect to |Δs| < 1e-13, then continue while the midpoint is still
        // representable so the returned value is as small as possible.
        loop {
            let mid = 0.5 * (lo.0 + hi.0);
            if mid <= lo.0 || mid >= hi.0 {
                break;
            }
            let guess = 0.5 * (lo.1 + hi.1);
            let (a, b, fm) = eval(mid, guess)?;
            let r = a.hypot(b);
            if fm == 0.0 {
                return Ok(Crossing {
                    s: mid,
                    alpha: a,
                    beta: b,
                    value: 0.0,
                    f_start,
                    f_end,
                });
            }
            if fm.signum() == lo.2.signum() {
                lo = (mid, r, fm);
            } else {
                hi = (mid, r, fm);
            }
            if hi.0 - lo.0 < 1e-13 && lo.2.abs().min(hi.2.abs()) < 1e-11 {
                break;
            }
        }
        let best = if lo.2.abs() <= hi.2.abs() { lo } else { hi };
        let (alpha, beta) = self.positions(best.0, best.1)?;
        Ok(Crossing {
            s: best.0,
            alpha,
            beta,
            value: best.2,
            f_start,
            f_end,
        })
    }
}

/// Zero of the signed-distance function along a sliding path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Crossing {
    pub s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub value: f64,
    pub f_start: f64,
    pub f_end: f64,
}

/// One sample of a sliding segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SlideSample {
    pub s: f64,
    pub x1: HPoint,
    pub x2: HPoint,
    /// Signed position of `x2` along the second line; nonnegative.
    pub sigma: f64,
}

/// Segment of fixed length sliding with its endpoints on two geodesics
/// through `z₀` in `H²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlidePath {
    pub d: f64,
    pub samples: Vec<SlideSample>,
}

impl SlidePath {
    /// Largest deviation of the sample distances from `d`.
    pub fn length_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|p| (dist(&p.x1, &p.x2) - self.d).abs())
            .fold(0.0, f64::max)
    }
}

fn unit_plane_vector(u: &DVector<f64>) -> Result<DVector<f64>> {
    if u.len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "sliding lines live in H², got direction of length {}",
            u.len()
        )));
    }
    let norm = u.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnit(norm));
    }
    Ok(u.clone())
}

/// Segment of length `d` sliding from `X₁ = -d` on the first line (with
/// `X₂ = z₀`) through `X₁ = z₀` to `X₁ = +d` (with `X₂ = z₀` again), keeping
/// `X₂` on the nonnegative half of the second line.
pub fn slide_path(d: f64, u1: &DVector<f64>, u2: &DVector<f64>) -> Result<SlidePath> {
    let u1 = unit_plane_vector(u1)?;
    let u2 = unit_plane_vector(u2)?;
    let curve = SlideCurve::new(Model::Hyperbolic, u1.dot(&u2), d)?;
    if d < DEGENERATE_LENGTH {
        let z0 = HPoint::origin(2);
        let samples = [-1.0, 1.0]
            .into_iter()
            .map(|s| SlideSample {
                s,
                x1: z0.clone(),
                x2: z0.clone(),
                sigma: 0.0,
            })
            .collect();
        return Ok(SlidePath { d, samples });
    }
    let samples = curve
        .trace()?
        .into_iter()
        .map(|(s, r)| {
            let (cos, sin) = SlideCurve::direction(s);
            let (alpha, beta) = (r * cos, r * sin);
            Ok(SlideSample {
                s,
                x1: geodesic_point(&u1, alpha)?,
                x2: geodesic_point(&u2, beta)?,
                sigma: beta,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SlidePath { d, samples })
}
