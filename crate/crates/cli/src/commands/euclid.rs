use nalgebra::DVector;

use tslab_core::lorentz::{random_group_element, random_rotation, GroupElement};
use tslab_core::polar::{
    euclid_fit, infinitesimal_polar_decompose, kah_decompose, TripleDirections, EUCLID_TOL,
};
use tslab_core::Error;

use super::{check_rank, dirs_of_rank, flag, random_vector, rng_for, run_parallel};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{Report, Row};

/// `infinitesimal` and `global` are 1 on success; `reconstruction` is the
/// relative residual of the infinitesimal factors and `fit_residual` the
/// relative line residual of a rigid fit to a feasible instance.
pub const EUCLID_COLUMNS: [&str; 5] = [
    "rank",
    "infinitesimal",
    "global",
    "reconstruction",
    "fit_residual",
];

/// Infinitesimal solver success, rank 2 and global solver success must
/// coincide. Ranks cycle through those `n` admits unless one is given.
pub fn cmd_euclid(config: &RunConfig, rank: Option<usize>) -> CliResult<Report> {
    let ranks: Vec<usize> = match rank {
        Some(r) => {
            check_rank(r, config.n)?;
            vec![r]
        }
        None => (1..=config.n.min(3)).collect(),
    };
    let rows = run_parallel(config.trials, |i| {
        euclid_trial(config, i, ranks[i % ranks.len()])
    });
    let mut report = Report::new("euclid", config, &EUCLID_COLUMNS);
    for row in rows {
        for (col, name) in [(3, "reconstruction"), (4, "fit_residual")] {
            if let Some(v) = row.values[col] {
                report.note_worst(name, v);
            }
        }
        report.push(row);
    }
    Ok(report)
}

fn euclid_trial(config: &RunConfig, trial: usize, rank: usize) -> Row {
    let n = config.n;
    let mut rng = rng_for(config.seed, trial, 0);
    let dirs = dirs_of_rank(n, rank, &mut rng);
    let z: [DVector<f64>; 3] = std::array::from_fn(|_| random_vector(n, &mut rng));
    let g: [GroupElement; 3] = std::array::from_fn(|_| random_group_element(n, &mut rng));
    let label = format!("rank{rank}");
    let mut values = vec![Some(rank as f64), None, None, None, None];
    let expect = (rank == 2) != config.fault(trial);

    let infinitesimal = infinitesimal_polar_decompose(&z, &dirs);
    let global = kah_decompose(&g, &dirs);
    values[1] = flag(infinitesimal.is_ok());
    values[2] = flag(global.is_ok());
    // Rejections must be for the configuration, not numerical trouble.
    for err in [infinitesimal.as_ref().err(), global.as_ref().err()]
        .into_iter()
        .flatten()
    {
        if expect || !matches!(err, Error::InvalidConfig(_)) {
            return Row::new(trial, label, false, err.code(), values);
        }
    }
    if expect {
        let inf = infinitesimal.expect("checked above");
        let scale = z.iter().map(|x| x.norm()).fold(1.0, f64::max);
        let back = inf.recompose(&dirs);
        let recon = (0..3)
            .map(|j| (&back[j] - &z[j]).amax())
            .fold(0.0, f64::max)
            / scale;
        values[3] = Some(recon);
        let fit = feasible_fit_residual(&dirs, &mut rng);
        values[4] = fit.as_ref().ok().copied();
        let ok = recon < config.tol("infinitesimal") && fit.as_ref().is_ok_and(|r| *r < EUCLID_TOL);
        let code = match fit {
            Err(err) => err.code(),
            Ok(_) if ok => "OK",
            Ok(_) => "RESIDUAL",
        };
        Row::new(trial, label, ok, code, values)
    } else {
        let ok = infinitesimal.is_err() && global.is_err();
        Row::new(
            trial,
            label,
            ok,
            if ok {
                "INVALID_CONFIG"
            } else {
                "UNEXPECTED_SUCCESS"
            },
            values,
        )
    }
}

/// Relative line residual of `euclid_fit` on points `R⁻¹(x_j u_j − T)`,
/// which a rigid motion maps onto the lines by construction.
fn feasible_fit_residual(
    dirs: &TripleDirections,
    rng: &mut tslab_core::lorentz::TrialRng,
) -> tslab_core::Result<f64> {
    let n = dirs.n();
    let r = random_rotation(n, rng);
    let shift = random_vector(n, rng);
    let z: [DVector<f64>; 3] = std::array::from_fn(|j| {
        let along = random_vector(1, rng)[0];
        r.transpose() * (dirs.u(j) * along - &shift)
    });
    let motion = euclid_fit(dirs.dirs(), &z)?;
    let scale = z.iter().map(|x| x.norm()).fold(1.0, f64::max);
    Ok(motion.line_residual(dirs.dirs(), &z) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_ranks_agree() {
        let report = cmd_euclid(&RunConfig::new(3, 12, 6).unwrap(), None).unwrap();
        assert!(report.all_passed(), "{}", report.summary());
        for row in &report.rows {
            let two = row.values[0] == Some(2.0);
            assert_eq!(row.values[1], flag(two));
            assert_eq!(row.values[2], flag(two));
        }
    }
}
