use tslab_core::measure::{numeric_jacobian_ratio, random_coordinate, RatioStats, FD_STEP};
use tslab_core::Error;

use super::{rng_for, run_parallel, MAX_ATTEMPTS};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::report::{Report, Row};

pub const MEASURE_COLUMNS: [&str; 4] = ["t1", "t2", "s", "ratio"];

/// Ratio of the finite-difference Jacobian to the closed-form density at
/// random sample points; the ratio must be constant up to `measure_spread`.
pub fn cmd_measure(config: &RunConfig) -> CliResult<Report> {
    let n = config.n;
    if !(2..=3).contains(&n) {
        return Err(CliError::Unsupported(format!(
            "measure verification covers n = 2 and n = 3 only; for n = {n} the coordinate map has positive-dimensional fibers"
        )));
    }
    let rows = run_parallel(config.trials, |i| measure_trial(config, i));
    let mut report = Report::new("measure", config, &MEASURE_COLUMNS);
    let mut ratios = Vec::with_capacity(rows.len());
    for (row, skipped) in rows {
        report.count("skipped_singular", skipped);
        if let Some(r) = row.values[3].filter(|_| row.passed) {
            ratios.push(r);
        }
        report.push(row);
    }
    let stats = RatioStats::from_samples(&ratios);
    let spread = stats.relative_spread() + if config.inject_fault { 1.0 } else { 0.0 };
    report.note_worst("relative_spread", spread);
    for r in &ratios {
        report.note_worst("ratio_deviation", (r / stats.mean - 1.0).abs());
    }
    report.check(
        "ratio_spread",
        ratios.len() >= 2 && spread < config.tol("measure_spread"),
    );
    Ok(report)
}

fn measure_trial(config: &RunConfig, trial: usize) -> (Row, u64) {
    let mut skipped = 0;
    for attempt in 0..MAX_ATTEMPTS {
        let c = random_coordinate(config.n, &mut rng_for(config.seed, trial, attempt));
        let coords = vec![Some(c.t1), Some(c.t2), Some(c.s)];
        match numeric_jacobian_ratio(&c, FD_STEP) {
            Ok(ratio) => {
                let ok = ratio.is_finite() && ratio > 0.0;
                let mut values = coords;
                values.push(Some(ratio));
                return (
                    Row::new(
                        trial,
                        "sample",
                        ok,
                        if ok { "OK" } else { "BAD_RATIO" },
                        values,
                    ),
                    skipped,
                );
            }
            Err(Error::SingularPoint(_)) => skipped += 1,
            Err(err) => {
                let mut values = coords;
                values.push(None);
                return (
                    Row::new(trial, "sample", false, err.code(), values),
                    skipped,
                );
            }
        }
    }
    (
        Row::new(trial, "sample", false, "SINGULAR_POINT", vec![None; 4]),
        skipped,
    )
}
