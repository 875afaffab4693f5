//! One module per command. Trials run in parallel; each draws from its own
//! substream and rows are collected in trial order, so reports do not depend
//! on the thread count.

mod dims;
mod euclid;
mod measure;
mod polar;
mod spherical;
mod suite;
mod unique;

pub use dims::{cmd_dims, DIMS_COLUMNS};
pub use euclid::{cmd_euclid, EUCLID_COLUMNS};
pub use measure::{cmd_measure, MEASURE_COLUMNS};
pub use polar::{cmd_polar, POLAR_COLUMNS};
pub use spherical::{classification_table, cmd_spherical, spherical_sweep, SPHERICAL_COLUMNS};
pub use suite::{cmd_suite, criteria, xux_check, Criterion};
pub use unique::{cmd_unique, UNIQUE_COLUMNS};

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;

use tslab_core::lorentz::{random_unit, trial_rng, TrialRng};
use tslab_core::polar::TripleDirections;

use crate::error::{CliError, CliResult};

/// Redraws allowed per trial before a degenerate sample counts as a failure.
const MAX_ATTEMPTS: u64 = 64;

fn run_parallel<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..count).into_par_iter().map(f).collect()
}

/// Substream for attempt `attempt` of trial `trial`.
fn rng_for(seed: u64, trial: usize, attempt: u64) -> TrialRng {
    trial_rng(seed, ((trial as u64) << 8) | attempt)
}

fn e(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

fn flag(b: bool) -> Option<f64> {
    Some(if b { 1.0 } else { 0.0 })
}

fn random_vector(n: usize, rng: &mut TrialRng) -> DVector<f64> {
    random_unit(n, rng) * rng.random_range(0.5..2.0)
}

/// Rejects ranks outside `1..=3` and ranks the dimension cannot carry.
fn check_rank(rank: usize, n: usize) -> CliResult<()> {
    if !(1..=3).contains(&rank) {
        return Err(CliError::InvalidInput(format!(
            "rank must be 1, 2 or 3, got {rank}"
        )));
    }
    if rank > n {
        return Err(CliError::InvalidInput(format!(
            "rank {rank} needs n >= {rank}, got n = {n}"
        )));
    }
    Ok(())
}

/// Random unit directions spanning a subspace of the given rank.
fn dirs_of_rank(n: usize, rank: usize, rng: &mut TrialRng) -> TripleDirections {
    let u1 = random_unit(n, rng);
    let fresh = |rng: &mut TrialRng, span: &[&DVector<f64>]| loop {
        let v = random_unit(n, rng);
        let mut w = v.clone();
        for s in span {
            w -= *s * s.dot(&v);
        }
        // Keep the configuration well away from lower rank.
        if w.norm() > 0.1 {
            return v;
        }
    };
    let dirs = match rank {
        1 => {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            TripleDirections::new(u1.clone(), &u1 * sign, u1.clone())
        }
        2 => {
            let u2 = fresh(rng, &[&u1]);
            let (a, b): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let u3 = if a.abs() + b.abs() < 0.1 {
                &u1 + &u2
            } else {
                &u1 * a + &u2 * b
            };
            TripleDirections::normalized(u1, u2, u3)
        }
        _ => {
            let u2 = fresh(rng, &[&u1]);
            let q2 = {
                let w = &u2 - &u1 * u1.dot(&u2);
                w.normalize()
            };
            let u3 = fresh(rng, &[&u1, &q2]);
            TripleDirections::new(u1, u2, u3)
        }
    };
    dirs.expect("unit directions by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_ranks() {
        for n in 2..6 {
            for rank in 1..=n.min(3) {
                for t in 0..20 {
                    let dirs = dirs_of_rank(n, rank, &mut rng_for(3, t, 0));
                    assert_eq!(dirs.rank(), rank, "n = {n}");
                }
            }
        }
    }

    #[test]
    fn rank_validation() {
        assert!(check_rank(3, 2).is_err());
        assert!(check_rank(0, 4).is_err());
        assert!(check_rank(4, 4).is_err());
        assert!(check_rank(2, 2).is_ok());
    }

    #[test]
    fn parallel_map_keeps_order() {
        assert_eq!(
            run_parallel(100, |i| i * i),
            (0..100).map(|i| i * i).collect::<Vec<_>>()
        );
    }
}
