use tslab_core::lorentz::{is_exp_s, random_boost};

use super::{
    classification_table, cmd_dims, cmd_euclid, cmd_measure, cmd_polar, cmd_unique, flag, rng_for,
    run_parallel, spherical_sweep,
};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{Report, Row};

/// One acceptance criterion: a fixed-size composition of command runs.
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    /// Wall-clock budget in seconds.
    pub budget: f64,
    pub run: fn(&RunConfig) -> CliResult<Report>,
}

/// The acceptance criteria in order. Dimensions and trial counts are fixed;
/// only the seed, tolerances and fault flag of the config are used.
pub fn criteria() -> [Criterion; 8] {
    [
        Criterion {
            id: 1,
            name: "dimension formulas",
            budget: 10.0,
            run: criterion_dims,
        },
        Criterion {
            id: 2,
            name: "sphericality routes",
            budget: 20.0,
            run: criterion_spherical,
        },
        Criterion {
            id: 3,
            name: "polar decomposition",
            budget: 30.0,
            run: criterion_polar,
        },
        Criterion {
            id: 4,
            name: "uniqueness up to normalizer",
            budget: 20.0,
            run: criterion_unique,
        },
        Criterion {
            id: 5,
            name: "measure density",
            budget: 20.0,
            run: criterion_measure,
        },
        Criterion {
            id: 6,
            name: "infinitesimal iff global",
            budget: 10.0,
            run: criterion_euclid,
        },
        Criterion {
            id: 7,
            name: "classification table",
            budget: 5.0,
            run: criterion_table,
        },
        Criterion {
            id: 8,
            name: "exp s closure",
            budget: 5.0,
            run: xux_check,
        },
    ]
}

fn sized(config: &RunConfig, salt: u64, n: usize, trials: usize) -> RunConfig {
    config.reseeded(salt).with(n, trials)
}

fn criterion_dims(config: &RunConfig) -> CliResult<Report> {
    cmd_dims(&sized(config, 1, 30, 20))
}

fn criterion_spherical(config: &RunConfig) -> CliResult<Report> {
    spherical_sweep(&sized(config, 2, 10, 1008))
}

fn criterion_polar(config: &RunConfig) -> CliResult<Report> {
    let runs = [(2, 2, 100), (3, 2, 100), (2, 1, 50), (3, 1, 50), (3, 3, 50)];
    let parts = runs
        .iter()
        .enumerate()
        .map(|(i, &(n, rank, trials))| {
            cmd_polar(&sized(config, 30 + i as u64, n, trials), Some(rank), None)
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Report::merge("polar", 3, config.seed, parts))
}

fn criterion_unique(config: &RunConfig) -> CliResult<Report> {
    let parts = [2, 3, 5]
        .iter()
        .map(|&n| cmd_unique(&sized(config, 40 + n as u64, n, 100)))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Report::merge("unique", 5, config.seed, parts))
}

fn criterion_measure(config: &RunConfig) -> CliResult<Report> {
    let parts = [2, 3]
        .iter()
        .map(|&n| cmd_measure(&sized(config, 50 + n as u64, n, 100)))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Report::merge("measure", 3, config.seed, parts))
}

fn criterion_euclid(config: &RunConfig) -> CliResult<Report> {
    let parts = [3, 5]
        .iter()
        .map(|&n| cmd_euclid(&sized(config, 60 + n as u64, n, 100), None))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Report::merge("euclid", 5, config.seed, parts))
}

fn criterion_table(config: &RunConfig) -> CliResult<Report> {
    classification_table(&sized(config, 7, 5, 1))
}

/// `exp X · exp U · exp X ∈ exp s₀` for random boosts, cycling through
/// `n ∈ {2, 3, 5}`, 1000 draws.
pub fn xux_check(config: &RunConfig) -> CliResult<Report> {
    let config = &sized(config, 8, 5, 1000);
    let dims = [2, 3, 5];
    let rows = run_parallel(config.trials, |i| {
        let n = dims[i % dims.len()];
        let mut rng = rng_for(config.seed, i, 0);
        let x = random_boost(n, &mut rng);
        let u = random_boost(n, &mut rng);
        let p = &(&x * &u) * &x;
        let ok = is_exp_s(&p, config.tol("xux")) != config.fault(i);
        Row::new(
            i,
            "xux",
            ok,
            if ok { "OK" } else { "NOT_EXP_S" },
            vec![Some(n as f64), flag(ok)],
        )
    });
    let mut report = Report::new("xux", config, &["n", "exp_s"]);
    for row in rows {
        report.push(row);
    }
    Ok(report)
}

/// Runs every criterion; one row per criterion with its trial counts.
pub fn cmd_suite(config: &RunConfig) -> CliResult<Report> {
    let mut report = Report::new("suite", config, &["trials", "passed", "failed"]);
    for c in criteria() {
        let part = (c.run)(config)?;
        for (k, v) in &part.worst {
            report.note_worst(&format!("{}.{k}", part.command), *v);
        }
        for (k, v) in &part.counters {
            report.count(&format!("{}.{k}", part.command), *v);
        }
        let ok = part.all_passed();
        let values = vec![
            Some(part.trials as f64),
            Some(part.passed as f64),
            Some(part.failed as f64),
        ];
        report.push(Row::new(
            c.id,
            c.name,
            ok,
            if ok { "PASS" } else { "FAIL" },
            values,
        ));
    }
    Ok(report)
}
