use std::collections::BTreeSet;

use nalgebra::DVector;

use tslab_core::lorentz::{random_group_element, random_rotation, random_unit, GroupElement};
use tslab_core::parabolic::{classify_config, is_spherical_triple, Parabolic};
use tslab_core::polar::{kah_decompose, TripleDirections};
use tslab_core::Result;

use super::{e, flag, rng_for, run_parallel};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{Report, Row};

/// Sweep rows fill the three route columns; classification rows fill
/// `polar` and `spherical_all`.
pub const SPHERICAL_COLUMNS: [&str; 8] = [
    "n",
    "distinct",
    "decomposable",
    "direct",
    "polar",
    "spherical_all",
    "expected_polar",
    "expected_spherical",
];

/// Separation of the `near` pattern, well above the distinctness threshold.
const NEAR_GAP: f64 = 1e-6;

const PATTERNS: [&str; 4] = ["equal", "near", "generic", "antipodal"];

/// Route sweep followed by the classification table.
pub fn cmd_spherical(config: &RunConfig) -> CliResult<Report> {
    let parts = vec![spherical_sweep(config)?, classification_table(config)?];
    Ok(Report::merge("spherical", config.n, config.seed, parts))
}

/// `config.trials` triples cycling through `n = 2..=config.n` and four
/// patterns: `q₁ = q₂`, `q₂` at distance [`NEAR_GAP`] from `q₁`, generic, and
/// `q₃ = −q₁`. Only the first is non-spherical.
pub fn spherical_sweep(config: &RunConfig) -> CliResult<Report> {
    let dims = config.n - 1;
    let rows = run_parallel(config.trials, |i| {
        let n = 2 + i % dims;
        let pattern = (i / dims) % PATTERNS.len();
        sweep_row(config, i, n, pattern)
    });
    let mut report = Report::new("spherical", config, &SPHERICAL_COLUMNS);
    for row in rows {
        report.push(row);
    }
    Ok(report)
}

fn sweep_row(config: &RunConfig, trial: usize, n: usize, pattern: usize) -> Row {
    let mut rng = rng_for(config.seed, trial, 0);
    let expected = (pattern != 0) != config.fault(trial);
    let q1 = random_unit(n, &mut rng);
    let q2 = match pattern {
        0 => q1.clone(),
        1 => {
            let r = random_unit(n, &mut rng);
            let w = (&r - &q1 * q1.dot(&r)).normalize();
            (&q1 + w * NEAR_GAP).normalize()
        }
        _ => random_unit(n, &mut rng),
    };
    let q3 = if pattern == 3 {
        -&q1
    } else {
        random_unit(n, &mut rng)
    };
    let check = (|| -> Result<_> {
        let p = [
            Parabolic::new(q1)?,
            Parabolic::new(q2)?,
            Parabolic::new(q3)?,
        ];
        is_spherical_triple(&p[0], &p[1], &p[2])
    })();
    let mut values = vec![
        Some(n as f64),
        None,
        None,
        None,
        None,
        None,
        None,
        flag(expected),
    ];
    match check {
        Ok(c) => {
            values[1] = flag(c.distinct);
            values[2] = flag(c.decomposable);
            values[3] = flag(c.direct);
            let ok = c.agree() && c.spherical() == expected;
            let code = if !c.agree() {
                "ROUTES_DISAGREE"
            } else if ok {
                "OK"
            } else {
                "MISMATCH"
            };
            Row::new(trial, PATTERNS[pattern], ok, code, values)
        }
        Err(err) => Row::new(trial, PATTERNS[pattern], false, err.code(), values),
    }
}

/// Constructed line configuration of one class with its expected verdicts.
struct ClassCase {
    n: usize,
    label: &'static str,
    u: [DVector<f64>; 3],
    polar: bool,
    spherical_all: bool,
}

fn class_instances(n: usize) -> Vec<ClassCase> {
    let case = |label, u, polar, spherical_all| ClassCase {
        n,
        label,
        u,
        polar,
        spherical_all,
    };
    let diag = (e(n, 0) + e(n, 1)) / 2f64.sqrt();
    let mut out = vec![
        case("rank2-distinct", [e(n, 0), e(n, 1), diag], true, true),
        case("rank2-pair-equal", [e(n, 0), e(n, 0), e(n, 1)], true, false),
        case("rank1", [e(n, 0), e(n, 0), e(n, 0)], false, false),
    ];
    if n >= 3 {
        out.insert(2, case("rank3", [e(n, 0), e(n, 1), e(n, 2)], false, true));
    }
    out
}

/// Classification of each constructed class in dimensions 2, 3 and
/// `config.n`, each instance rotated by a random `SO(n)` element. The polar
/// verdict is cross-checked by attempting a decomposition.
pub fn classification_table(config: &RunConfig) -> CliResult<Report> {
    let dims: BTreeSet<usize> = [2, 3, config.n]
        .into_iter()
        .filter(|&d| d <= config.n)
        .collect();
    let cases: Vec<ClassCase> = dims.into_iter().flat_map(class_instances).collect();
    let seed = config.reseeded(7).seed;
    let rows = run_parallel(cases.len(), |i| {
        let ClassCase {
            n,
            label,
            u,
            polar: want_polar,
            spherical_all,
        } = &cases[i];
        let (n, want_polar) = (*n, *want_polar);
        let mut rng = rng_for(seed, i, 0);
        let r = random_rotation(n, &mut rng);
        let g: [GroupElement; 3] = std::array::from_fn(|_| random_group_element(n, &mut rng));
        let want_spherical = *spherical_all != config.fault(i);
        let mut values = vec![
            Some(n as f64),
            None,
            None,
            None,
            None,
            None,
            flag(want_polar),
            flag(want_spherical),
        ];
        let class = (|| -> Result<_> {
            let dirs = TripleDirections::normalized(&r * &u[0], &r * &u[1], &r * &u[2])?;
            let class = classify_config(&dirs)?;
            Ok((class, kah_decompose(&g, &dirs).is_ok()))
        })();
        match class {
            Ok((class, decomposed)) => {
                values[4] = flag(class.polar);
                values[5] = flag(class.spherical_all);
                let ok = class.polar == want_polar
                    && decomposed == want_polar
                    && class.spherical_all == want_spherical;
                Row::new(i, *label, ok, if ok { "OK" } else { "MISMATCH" }, values)
            }
            Err(err) => Row::new(i, *label, false, err.code(), values),
        }
    });
    let mut report = Report::new("classify", config, &SPHERICAL_COLUMNS);
    for row in rows {
        report.push(row);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_has_every_class() {
        let report = classification_table(&RunConfig::new(4, 1, 3).unwrap()).unwrap();
        assert!(report.all_passed(), "{}", report.summary());
        // Three classes for n = 2, four each for n = 3 and n = 4.
        assert_eq!(report.trials, 11);
        let rank3 = report.rows.iter().find(|r| r.label == "rank3").unwrap();
        assert_eq!(rank3.values[4..6], [Some(0.0), Some(1.0)]);
    }

    #[test]
    fn equal_points_are_never_spherical() {
        let report = spherical_sweep(&RunConfig::new(4, 24, 3).unwrap()).unwrap();
        assert!(report.all_passed(), "{}", report.summary());
        for row in report.rows.iter().filter(|r| r.label == "equal") {
            assert_eq!(row.values[1..4], [Some(0.0), Some(0.0), Some(0.0)]);
        }
    }
}
