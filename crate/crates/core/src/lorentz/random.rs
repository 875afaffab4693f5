use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{exp_boost, GroupElement};

/// Counter-based generator used for every randomized routine.
pub type TrialRng = ChaCha8Rng;

/// Independent substream `stream` of the generator seeded by `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Uniform point of the unit sphere in `R^n`.
pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = gaussian_vector(n, rng);
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Haar-distributed element of `SO(n)`.
pub fn random_rotation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Haar-distributed element of `K₀ = SO(n)` embedded as `diag(R, 1)`.
pub fn random_k0<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GroupElement {
    GroupElement::rotation(&random_rotation(n, rng))
}

/// `exp(X_b)` with standard Gaussian `b`.
pub fn random_boost<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GroupElement {
    exp_boost(&gaussian_vector(n, rng))
}

/// `k · exp(X_b)` with Haar `k` and Gaussian `b`.
pub fn random_group_element<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GroupElement {
    let k = random_k0(n, rng);
    let a = random_boost(n, rng);
    &k * &a
}
