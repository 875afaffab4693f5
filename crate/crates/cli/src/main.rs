use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tslab_cli::commands::{
    cmd_dims, cmd_euclid, cmd_measure, cmd_polar, cmd_spherical, cmd_suite, cmd_unique,
};
use tslab_cli::config::{parse_tol_flag, resolve_tolerances, TOL_ENV};
use tslab_cli::{CliResult, Report, RunConfig};

/// Randomized verification sweeps for polar decompositions of triple spaces.
#[derive(Parser)]
#[command(name = "tslab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parabolic dimension formulas and the dimension identity, n = 2..=N.
    Dims(Common),
    /// Polar decompositions of random or supplied triples.
    Polar {
        #[command(flatten)]
        common: Common,
        /// Rank of the random direction configurations (1, 2 or 3).
        #[arg(long)]
        rank: Option<usize>,
        /// JSON file with {"records": [{"triple": ..., "dirs": ...}]}.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Canonical-form agreement and normalizer orbits under g -> k g h.
    Unique(Common),
    /// Sphericality route agreement and the configuration classification.
    Spherical(Common),
    /// Constancy of the numeric Jacobian over the closed-form density.
    Measure(Common),
    /// Infinitesimal and global solvability against rank.
    Euclid {
        #[command(flatten)]
        common: Common,
        /// Rank of the direction configurations; cycles through 1..=3 if absent.
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Every acceptance criterion at its fixed size.
    Suite(Common),
}

#[derive(Args)]
struct Common {
    /// Dimension, or the largest dimension for sweeps.
    #[arg(long)]
    n: Option<usize>,
    /// Number of trials.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance override name=value; repeatable, beats the environment.
    #[arg(long = "tol", value_parser = parse_tol_flag)]
    tol: Vec<(String, f64)>,
    /// CSV file for the per-trial rows.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the report as JSON instead of a summary.
    #[arg(long)]
    json: bool,
    /// Harness self-test: corrupt the oracle of the first trial.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

impl Common {
    fn config(&self, n: usize, trials: usize) -> CliResult<RunConfig> {
        let env = std::env::var(TOL_ENV).ok();
        RunConfig {
            n: self.n.unwrap_or(n),
            trials: self.trials.unwrap_or(trials),
            seed: self.seed,
            tolerances: resolve_tolerances(env.as_deref(), &self.tol)?,
            output_path: self.out.clone(),
            inject_fault: self.inject_fault,
        }
        .validated()
    }
}

fn run(cli: Cli) -> CliResult<(Report, bool)> {
    let (report, common) = match &cli.command {
        Command::Dims(c) => (cmd_dims(&c.config(30, 20)?)?, c),
        Command::Polar {
            common,
            rank,
            input,
        } => (
            cmd_polar(&common.config(2, 100)?, *rank, input.as_deref())?,
            common,
        ),
        Command::Unique(c) => (cmd_unique(&c.config(3, 100)?)?, c),
        Command::Spherical(c) => (cmd_spherical(&c.config(10, 1000)?)?, c),
        Command::Measure(c) => (cmd_measure(&c.config(2, 100)?)?, c),
        Command::Euclid { common, rank } => (cmd_euclid(&common.config(3, 200)?, *rank)?, common),
        Command::Suite(c) => (cmd_suite(&c.config(2, 1)?)?, c),
    };
    if let Some(path) = &common.out {
        report.write_csv(path)?;
    }
    Ok((report, common.json))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((report, json)) => {
            if json {
                match report.to_json() {
                    Ok(text) => println!("{text}"),
                    Err(err) => {
                        eprintln!("{err}");
                        return ExitCode::from(2);
                    }
                }
            } else {
                print!("{}", report.summary());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
