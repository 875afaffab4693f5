use tslab_core::lorentz::{random_group_element, random_k0, GroupElement};
use tslab_core::polar::{
    a_orbit, a_sign_actions, canonical_a, conjugate_by_normalizer, kah_decompose,
    normalizer_element, same_orbit, TripleDirections,
};
use tslab_core::{Error, Result};

use super::{e, rng_for, run_parallel, MAX_ATTEMPTS};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{Report, Row};

pub const UNIQUE_COLUMNS: [&str; 10] = [
    "t1",
    "t2",
    "t3",
    "t1_moved",
    "t2_moved",
    "t3_moved",
    "discrepancy",
    "orbit_size",
    "orbit_defect",
    "skipped",
];

/// Draws with `|t₁ − t₂|` or `|t₃|` below this are degenerate: the first
/// breaks the uniqueness hypothesis, the second collapses the sign orbit.
const DEGENERATE: f64 = 1e-3;

struct Outcome {
    values: Vec<Option<f64>>,
    ok: bool,
    discrepancy: f64,
    orbit_defect: f64,
}

/// Round trips `g ↦ k·g·h` with `u₁ = u₂ = e_n ⊥ u₃ = e_1`: canonical
/// A-coordinates must agree, and every normalizer sign action must be
/// realized by an explicit conjugation.
pub fn cmd_unique(config: &RunConfig) -> CliResult<Report> {
    let n = config.n;
    let dirs = TripleDirections::new(e(n, n - 1), e(n, n - 1), e(n, 0))?;
    let rows = run_parallel(config.trials, |i| unique_trial(config, i, &dirs));
    let mut report = Report::new("unique", config, &UNIQUE_COLUMNS);
    for (row, outcome, skipped) in rows {
        report.count("skipped_degenerate", skipped);
        if let Some(o) = outcome {
            report.note_worst("canonical_discrepancy", o.discrepancy);
            report.note_worst("orbit_defect", o.orbit_defect);
        }
        report.push(row);
    }
    if n == 2 {
        // Only the common-sign actions exist in the plane.
        let mixed = normalizer_element(&e(2, 1), &e(2, 0), 1.0, -1.0);
        report.check(
            "plane_mixed_signs_rejected",
            matches!(mixed, Err(Error::InvalidConfig(_))),
        );
    }
    Ok(report)
}

fn unique_trial(
    config: &RunConfig,
    trial: usize,
    dirs: &TripleDirections,
) -> (Row, Option<Outcome>, u64) {
    let mut skipped = 0;
    for attempt in 0..MAX_ATTEMPTS {
        match round_trip(config, trial, attempt, dirs) {
            Ok(Some(o)) => {
                let code = if o.ok { "OK" } else { "MISMATCH" };
                let mut values = o.values.clone();
                values[9] = Some(skipped as f64);
                return (
                    Row::new(trial, "round-trip", o.ok, code, values),
                    Some(o),
                    skipped,
                );
            }
            Ok(None) => skipped += 1,
            Err(err) => {
                let values = vec![None; UNIQUE_COLUMNS.len()];
                return (
                    Row::new(trial, "round-trip", false, err.code(), values),
                    None,
                    skipped,
                );
            }
        }
    }
    let values = vec![None; UNIQUE_COLUMNS.len()];
    (
        Row::new(trial, "round-trip", false, "HYPOTHESIS_VIOLATED", values),
        None,
        skipped,
    )
}

/// `None` for degenerate draws.
fn round_trip(
    config: &RunConfig,
    trial: usize,
    attempt: u64,
    dirs: &TripleDirections,
) -> Result<Option<Outcome>> {
    let n = dirs.n();
    let mut rng = rng_for(config.seed, trial, attempt);
    let g: [GroupElement; 3] = std::array::from_fn(|_| random_group_element(n, &mut rng));
    let k: [GroupElement; 3] = std::array::from_fn(|_| random_k0(n, &mut rng));
    let h = random_group_element(n, &mut rng);
    let moved: [GroupElement; 3] = std::array::from_fn(|j| &(&k[j] * &g[j]) * &h);

    let res = kah_decompose(&g, dirs)?;
    let res_moved = kah_decompose(&moved, dirs)?;
    let (t, tm) = (res.t, res_moved.t);
    if [t, tm]
        .iter()
        .any(|x| (x[0] - x[1]).abs() < DEGENERATE || x[2].abs() < DEGENERATE)
    {
        return Ok(None);
    }

    let (c, cm) = (canonical_a(t, n), canonical_a(tm, n));
    let shift = if config.fault(trial) { 1.0 } else { 0.0 };
    let discrepancy = (0..3).map(|j| (c[j] - cm[j]).abs()).fold(0.0, f64::max) + shift;
    let tol = config.tol("canonical");
    let orbit_match = same_orbit(t, tm, n, tol)?;

    // Each sign action must come from a normalizer element that refactors g.
    let u = dirs.u(0);
    let v = dirs.u(2);
    let predicted = a_orbit(t, n);
    let mut realized: Vec<[f64; 3]> = Vec::new();
    let mut orbit_defect: f64 = 0.0;
    let mut refactors = true;
    for (signs, want) in a_sign_actions(n).into_iter().zip(&predicted) {
        let m = normalizer_element(u, v, signs.0, signs.1)?;
        let conj = conjugate_by_normalizer(&res, dirs, &m)?;
        refactors &= conj.max_deviation(&g, dirs) < config.tol("kah_residual");
        orbit_defect = orbit_defect.max(
            (0..3)
                .map(|j| (conj.t[j] - want[j]).abs())
                .fold(0.0, f64::max),
        );
        let seen = realized
            .iter()
            .any(|x| (0..3).all(|j| (x[j] - conj.t[j]).abs() <= config.tol("orbit")));
        if !seen {
            realized.push(conj.t);
        }
    }
    let orbit_size = realized.len();

    let ok = discrepancy < tol
        && orbit_match
        && orbit_size == a_sign_actions(n).len()
        && orbit_defect < config.tol("orbit")
        && refactors;
    let values = vec![
        Some(t[0]),
        Some(t[1]),
        Some(t[2]),
        Some(tm[0]),
        Some(tm[1]),
        Some(tm[2]),
        Some(discrepancy),
        Some(orbit_size as f64),
        Some(orbit_defect),
        None,
    ];
    Ok(Some(Outcome {
        values,
        ok,
        discrepancy,
        orbit_defect,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_sizes_by_dimension() {
        for (n, size) in [(2, 2.0), (3, 4.0)] {
            let report = cmd_unique(&RunConfig::new(n, 4, 8).unwrap()).unwrap();
            assert!(report.all_passed(), "{}", report.summary());
            assert!(report.rows.iter().all(|r| r.values[7] == Some(size)));
        }
    }
}
