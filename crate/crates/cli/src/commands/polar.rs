use std::path::Path;

use tslab_core::lorentz::{random_group_element, GroupElement};
use tslab_core::polar::{kah_decompose, TripleDirections};
use tslab_core::Error;

use super::{check_rank, dirs_of_rank, rng_for, run_parallel};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::io::{read_polar_input, DecompositionJson, DirsJson, PolarRecord, TripleJson};
use crate::report::{Report, Row};

pub const POLAR_COLUMNS: [&str; 6] = ["rank", "t1", "t2", "t3", "residual", "k_defect"];

/// Decomposes supplied or random triples. Rank-2 configurations must
/// decompose within `kah_residual`; other ranks must be rejected as
/// INVALID_CONFIG.
pub fn cmd_polar(
    config: &RunConfig,
    rank: Option<usize>,
    input: Option<&Path>,
) -> CliResult<Report> {
    let instances: Vec<([GroupElement; 3], TripleDirections)> = match input {
        Some(path) => read_polar_input(path)?,
        None => {
            let rank = rank.unwrap_or(2);
            check_rank(rank, config.n)?;
            run_parallel(config.trials, |i| {
                let mut rng = rng_for(config.seed, i, 0);
                let dirs = dirs_of_rank(config.n, rank, &mut rng);
                let g = std::array::from_fn(|_| random_group_element(config.n, &mut rng));
                (g, dirs)
            })
        }
    };
    let outcomes = run_parallel(instances.len(), |i| {
        let (g, dirs) = &instances[i];
        polar_trial(config, i, g, dirs)
    });
    let mut report = Report::new("polar", config, &POLAR_COLUMNS);
    let mut records = Vec::with_capacity(outcomes.len());
    for (row, record) in outcomes {
        if let Some(r) = row.values[4] {
            report.note_worst("kah_residual", r);
        }
        report.push(row);
        records.push(record);
    }
    report.records = Some(records);
    Ok(report)
}

fn polar_trial(
    config: &RunConfig,
    trial: usize,
    g: &[GroupElement; 3],
    dirs: &TripleDirections,
) -> (Row, PolarRecord) {
    let rank = dirs.rank();
    let label = format!("rank{rank}");
    let mut record = PolarRecord {
        triple: TripleJson::from_triple(g),
        dirs: DirsJson::from_dirs(dirs),
        decomposition: None,
    };
    let mut values = vec![None; POLAR_COLUMNS.len()];
    values[0] = Some(rank as f64);
    let row = match kah_decompose(g, dirs) {
        Ok(res) => {
            let shift = if config.fault(trial) { 1.0 } else { 0.0 };
            let residual = res.residual.max(res.max_deviation(g, dirs)) + shift;
            values[1..4].copy_from_slice(&res.t.map(Some));
            values[4] = Some(residual);
            values[5] = Some(res.k_defect);
            record.decomposition = Some(DecompositionJson::from_result(&res));
            let ok = rank == 2 && residual < config.tol("kah_residual");
            let code = match (rank == 2, ok) {
                (false, _) => "UNEXPECTED_SUCCESS",
                (true, false) => "RESIDUAL",
                (true, true) => "OK",
            };
            Row::new(trial, label, ok, code, values)
        }
        Err(err) => {
            let ok = rank != 2 && matches!(err, Error::InvalidConfig(_));
            Row::new(trial, label, ok, err.code(), values)
        }
    };
    (row, record)
}
