use rand::Rng;

use tslab_core::lorentz::random_unit;
use tslab_core::parabolic::{
    dim_identity_terms, pair_dim, pair_intersection_basis, parabolic_basis, parabolic_dim,
    triple_dim, triple_intersection_basis, Parabolic, ParabolicTriple,
};
use tslab_core::subspace::extend_to_basis;
use tslab_core::Result;

use super::{flag, rng_for, run_parallel};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{Report, Row};

/// `parabolic`, `pair` and `triple` are ranks of explicit bases;
/// `pair_numeric` and `triple_numeric` are the constraint-based terms of the
/// dimension identity. Both routes must match the formulas.
pub const DIMS_COLUMNS: [&str; 8] = [
    "n",
    "coplanar",
    "parabolic",
    "pair",
    "triple",
    "pair_numeric",
    "triple_numeric",
    "identity",
];

struct Case {
    n: usize,
    coplanar: bool,
}

/// Sweeps `n = 2..=config.n`, with `config.trials` random and
/// `config.trials` coplanar triples per dimension.
pub fn cmd_dims(config: &RunConfig) -> CliResult<Report> {
    let cases: Vec<Case> = (2..=config.n)
        .flat_map(|n| {
            [false, true]
                .into_iter()
                .flat_map(move |coplanar| (0..config.trials).map(move |_| Case { n, coplanar }))
        })
        .collect();
    let rows = run_parallel(cases.len(), |i| dims_row(config, i, &cases[i]));
    let mut report = Report::new("dims", config, &DIMS_COLUMNS);
    for row in rows {
        report.push(row);
    }
    Ok(report)
}

fn draw(case: &Case, seed: u64, trial: usize) -> Result<[Parabolic; 3]> {
    let mut rng = rng_for(seed, trial, 0);
    let n = case.n;
    if case.coplanar {
        let v = random_unit(n, &mut rng);
        let w = random_unit(n, &mut rng);
        let plane = extend_to_basis(&[v, w], n);
        // Angles in disjoint arcs keep the three points distinct.
        let arcs = [(0.0, 2.0), (2.1, 4.0), (4.1, 6.2)];
        let q = arcs.map(|(lo, hi)| {
            let a: f64 = rng.random_range(lo..hi);
            &plane[0] * a.cos() + &plane[1] * a.sin()
        });
        let [q1, q2, q3] = q;
        Ok([
            Parabolic::new(q1)?,
            Parabolic::new(q2)?,
            Parabolic::new(q3)?,
        ])
    } else {
        Ok([
            Parabolic::new(random_unit(n, &mut rng))?,
            Parabolic::new(random_unit(n, &mut rng))?,
            Parabolic::new(random_unit(n, &mut rng))?,
        ])
    }
}

fn dims_row(config: &RunConfig, trial: usize, case: &Case) -> Row {
    let n = case.n;
    let label = if case.coplanar { "coplanar" } else { "random" };
    let attempt = || -> Result<(Vec<Option<f64>>, bool)> {
        let [p1, p2, p3] = draw(case, config.seed, trial)?;
        let shape = ParabolicTriple::new(&p1, &p2, &p3)?;
        let first = parabolic_basis(&p1)?.rank();
        let pair = pair_intersection_basis(&p2, &p3)?.rank();
        let triple = triple_intersection_basis(&p1, &p2, &p3)?.rank();
        let terms = dim_identity_terms(&p1, &p2, &p3)?;
        let expected_triple = triple_dim(n) + usize::from(config.fault(trial));
        let ok = shape.distinct
            && shape.dependent == (case.coplanar || n == 2)
            && first == parabolic_dim(n)
            && terms.first == first
            && pair == pair_dim(n)
            && terms.pair == pair
            && triple == expected_triple
            && terms.triple == triple
            && terms.holds();
        let values = vec![
            Some(n as f64),
            flag(case.coplanar),
            Some(first as f64),
            Some(pair as f64),
            Some(triple as f64),
            Some(terms.pair as f64),
            Some(terms.triple as f64),
            flag(terms.holds()),
        ];
        Ok((values, ok))
    };
    match attempt() {
        Ok((values, ok)) => Row::new(trial, label, ok, if ok { "OK" } else { "MISMATCH" }, values),
        Err(err) => {
            let mut values = vec![None; DIMS_COLUMNS.len()];
            values[0] = Some(n as f64);
            values[1] = flag(case.coplanar);
            Row::new(trial, label, false, err.code(), values)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_dimension_row() {
        let report = cmd_dims(&RunConfig::new(2, 3, 1).unwrap()).unwrap();
        assert!(report.all_passed());
        for row in &report.rows {
            assert_eq!(row.values[2..5], [Some(2.0), Some(1.0), Some(0.0)]);
        }
    }

    #[test]
    fn fault_flips_one_trial() {
        let mut config = RunConfig::new(3, 2, 1).unwrap();
        config.inject_fault = true;
        let report = cmd_dims(&config).unwrap();
        assert_eq!(report.failed, 1);
        assert_eq!(report.exit_code(), 1);
    }
}
