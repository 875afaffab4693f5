use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{CliError, CliResult};

/// Environment variable holding a JSON map of tolerance overrides.
pub const TOL_ENV: &str = "TSLAB_TOL_OVERRIDE";

/// Named tolerances and their defaults. Names outside this list are rejected.
pub const DEFAULT_TOLERANCES: [(&str, f64); 6] = [
    // Max-norm recomposition residual of a polar decomposition.
    ("kah_residual", 1e-8),
    // Max discrepancy of canonical A-coordinates across a round trip.
    ("canonical", 1e-6),
    // Max distance between a conjugated A-coordinate and its predicted orbit point.
    ("orbit", 1e-6),
    // Relative spread (stddev / mean) of the measure ratio.
    ("measure_spread", 1e-3),
    // Relative reconstruction residual of the infinitesimal decomposition.
    ("infinitesimal", 1e-9),
    // Symmetry and eigenvalue tolerance of the exp-s membership test.
    ("xux", 1e-9),
];

/// Tolerance map with defaults, then the environment, then explicit flags.
pub fn resolve_tolerances(
    env: Option<&str>,
    flags: &[(String, f64)],
) -> CliResult<BTreeMap<String, f64>> {
    let mut tol: BTreeMap<String, f64> = DEFAULT_TOLERANCES
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    let mut set = |name: &str, value: f64, source: &str| -> CliResult<()> {
        match tol.get_mut(name) {
            None => Err(CliError::InvalidInput(format!(
                "unknown tolerance `{name}` in {source}"
            ))),
            Some(_) if !(value > 0.0 && value.is_finite()) => Err(CliError::InvalidInput(format!(
                "tolerance `{name}` must be positive and finite, got {value} in {source}"
            ))),
            Some(slot) => {
                *slot = value;
                Ok(())
            }
        }
    };
    if let Some(text) = env.filter(|t| !t.trim().is_empty()) {
        let parsed: BTreeMap<String, f64> = serde_json::from_str(text).map_err(|e| {
            CliError::InvalidInput(format!("{TOL_ENV} is not a JSON map of numbers: {e}"))
        })?;
        for (name, value) in parsed {
            set(&name, value, TOL_ENV)?;
        }
    }
    for (name, value) in flags {
        set(name, *value, "--tol")?;
    }
    Ok(tol)
}

/// Parses a `name=value` tolerance flag.
pub fn parse_tol_flag(text: &str) -> Result<(String, f64), String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{text}`"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("bad value in `{text}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

/// Settings shared by every command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Dimension, or the largest dimension for sweeping commands.
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub output_path: Option<PathBuf>,
    /// Harness self-test: corrupts the oracle of trial 0 so that it fails.
    pub inject_fault: bool,
}

impl RunConfig {
    pub fn new(n: usize, trials: usize, seed: u64) -> CliResult<Self> {
        RunConfig {
            n,
            trials,
            seed,
            tolerances: resolve_tolerances(None, &[])?,
            output_path: None,
            inject_fault: false,
        }
        .validated()
    }

    pub fn validated(self) -> CliResult<Self> {
        if self.n < 2 {
            return Err(CliError::InvalidInput(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if self.trials == 0 {
            return Err(CliError::InvalidInput("trials must be positive".into()));
        }
        if let Some((name, v)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0)) {
            return Err(CliError::InvalidInput(format!(
                "tolerance `{name}` = {v} is not positive"
            )));
        }
        Ok(self)
    }

    /// Same settings with another dimension and trial count.
    pub fn with(&self, n: usize, trials: usize) -> Self {
        RunConfig {
            n,
            trials,
            ..self.clone()
        }
    }

    /// Same settings with a derived seed, so that sub-runs draw independent streams.
    pub fn reseeded(&self, salt: u64) -> Self {
        RunConfig {
            seed: self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15),
            ..self.clone()
        }
    }

    pub fn tol(&self, name: &str) -> f64 {
        *self
            .tolerances
            .get(name)
            .unwrap_or_else(|| panic!("tolerance `{name}` has no default"))
    }

    /// Oracle corruption for the fault-injection self-test.
    pub fn fault(&self, trial: usize) -> bool {
        self.inject_fault && trial == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_env_beats_default() {
        let tol = resolve_tolerances(
            Some(r#"{"kah_residual": 1e-7, "canonical": 1e-5}"#),
            &[("kah_residual".into(), 1e-6)],
        )
        .unwrap();
        assert_eq!(tol["kah_residual"], 1e-6);
        assert_eq!(tol["canonical"], 1e-5);
        assert_eq!(tol["measure_spread"], 1e-3);
    }

    #[test]
    fn rejects_unknown_and_nonpositive() {
        assert!(resolve_tolerances(Some(r#"{"nope": 1.0}"#), &[]).is_err());
        assert!(resolve_tolerances(None, &[("xux".into(), 0.0)]).is_err());
        assert!(resolve_tolerances(Some("[1, 2]"), &[]).is_err());
    }

    #[test]
    fn tol_flag_syntax() {
        assert_eq!(parse_tol_flag("xux=1e-8").unwrap(), ("xux".into(), 1e-8));
        assert!(parse_tol_flag("xux").is_err());
        assert!(parse_tol_flag("xux=abc").is_err());
    }

    #[test]
    fn config_invariants() {
        assert!(RunConfig::new(1, 10, 0).is_err());
        assert!(RunConfig::new(2, 0, 0).is_err());
        assert!(RunConfig::new(2, 1, 0).is_ok());
    }
}
