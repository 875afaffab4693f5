use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::{format_float, parse_float, PolarRecord};

/// Outcome of one trial. `values` follow the report's `columns`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub trial: usize,
    pub label: String,
    pub passed: bool,
    /// `OK`, or the error code that decided the trial.
    pub code: String,
    pub values: Vec<Option<f64>>,
}

impl Row {
    /// Non-finite values become missing, so that rows survive JSON and CSV.
    pub fn new(
        trial: usize,
        label: impl Into<String>,
        passed: bool,
        code: impl Into<String>,
        values: Vec<Option<f64>>,
    ) -> Self {
        Row {
            trial,
            label: label.into(),
            passed,
            code: code.into(),
            values: values
                .into_iter()
                .map(|v| v.filter(|x| x.is_finite()))
                .collect(),
        }
    }
}

/// Result of one command run. `passed + failed = trials = rows.len()`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    /// Largest observed value of each monitored residual.
    pub worst: BTreeMap<String, f64>,
    /// Event counts, such as skipped degenerate draws.
    pub counters: BTreeMap<String, u64>,
    /// Aggregate assertions that are not per-trial.
    pub checks: BTreeMap<String, bool>,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<PolarRecord>>,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig, columns: &[&str]) -> Self {
        Report {
            command: command.to_string(),
            n: config.n,
            seed: config.seed,
            trials: 0,
            passed: 0,
            failed: 0,
            worst: BTreeMap::new(),
            counters: BTreeMap::new(),
            checks: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            records: None,
        }
    }

    pub fn push(&mut self, row: Row) {
        debug_assert_eq!(row.values.len(), self.columns.len());
        self.trials += 1;
        if row.passed {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        self.rows.push(row);
    }

    /// Records `value` for `name` if it is the largest so far. Non-finite
    /// values are stored as `f64::MAX`, so they cannot hide and still survive
    /// a JSON round trip.
    pub fn note_worst(&mut self, name: &str, value: f64) {
        let value = if value.is_finite() { value } else { f64::MAX };
        let slot = self.worst.entry(name.to_string()).or_insert(value);
        if value > *slot {
            *slot = value;
        }
    }

    pub fn count(&mut self, name: &str, by: u64) {
        *self.counters.entry(name.to_string()).or_insert(0) += by;
    }

    pub fn check(&mut self, name: &str, ok: bool) {
        let slot = self.checks.entry(name.to_string()).or_insert(true);
        *slot &= ok;
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.trials > 0 && self.checks.values().all(|&ok| ok)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    /// Concatenates reports with identical columns. Maxima, counts and checks
    /// combine associatively, so the order of parts only affects row order.
    pub fn merge(command: &str, n: usize, seed: u64, parts: Vec<Report>) -> Report {
        let columns = parts.first().map(|p| p.columns.clone()).unwrap_or_default();
        let mut out = Report {
            command: command.to_string(),
            n,
            seed,
            trials: 0,
            passed: 0,
            failed: 0,
            worst: BTreeMap::new(),
            counters: BTreeMap::new(),
            checks: BTreeMap::new(),
            columns,
            rows: Vec::new(),
            records: None,
        };
        for part in parts {
            assert_eq!(
                part.columns, out.columns,
                "merged reports must share columns"
            );
            for (k, v) in &part.worst {
                out.note_worst(k, *v);
            }
            for (k, v) in &part.counters {
                out.count(k, *v);
            }
            for (k, v) in &part.checks {
                out.check(k, *v);
            }
            for row in part.rows {
                out.push(row);
            }
            if let Some(records) = part.records {
                out.records.get_or_insert_with(Vec::new).extend(records);
            }
        }
        out
    }

    /// Human-readable summary, one fact per line.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} n={} seed={}: {} trials, {} passed, {} failed",
            self.command, self.n, self.seed, self.trials, self.passed, self.failed
        );
        for (k, v) in &self.worst {
            let _ = writeln!(s, "  worst {k} = {v:.3e}");
        }
        for (k, v) in &self.counters {
            let _ = writeln!(s, "  count {k} = {v}");
        }
        for (k, v) in &self.checks {
            let _ = writeln!(s, "  check {k}: {}", if *v { "pass" } else { "FAIL" });
        }
        if self.command == "suite" {
            for row in &self.rows {
                let counts: Vec<String> =
                    row.values.iter().flatten().map(|v| v.to_string()).collect();
                let _ = writeln!(
                    s,
                    "  criterion {} {}: {} (trials/passed/failed {})",
                    row.trial,
                    row.label,
                    row.code,
                    counts.join("/")
                );
            }
        }
        for row in self.rows.iter().filter(|r| !r.passed).take(10) {
            let _ = writeln!(
                s,
                "  failed trial {} [{}]: {}",
                row.trial, row.label, row.code
            );
        }
        let _ = writeln!(s, "{}", if self.all_passed() { "PASS" } else { "FAIL" });
        s
    }

    pub fn to_json(&self) -> CliResult<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> CliResult<Report> {
        Ok(serde_json::from_str(text)?)
    }

    /// Header `trial,label,passed,code,<columns>`; one line per row.
    pub fn write_csv(&self, path: &Path) -> CliResult<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["trial", "label", "passed", "code"];
        header.extend(self.columns.iter().map(String::as_str));
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![
                row.trial.to_string(),
                row.label.clone(),
                row.passed.to_string(),
                row.code.clone(),
            ];
            rec.extend(row.values.iter().map(|v| format_float(*v)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a CSV written by [`Report::write_csv`] back into columns and rows.
pub fn read_csv(path: &Path) -> CliResult<(Vec<String>, Vec<Row>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.len() < 4 || header[..4] != ["trial", "label", "passed", "code"] {
        return Err(CliError::InvalidInput("not a tslab report CSV".into()));
    }
    let columns = header[4..].to_vec();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let bad = |what: &str| CliError::InvalidInput(format!("bad {what} in CSV row"));
        rows.push(Row {
            trial: rec[0].parse().map_err(|_| bad("trial"))?,
            label: rec[1].to_string(),
            passed: rec[2].parse().map_err(|_| bad("passed flag"))?,
            code: rec[3].to_string(),
            values: rec
                .iter()
                .skip(4)
                .map(parse_float)
                .collect::<CliResult<_>>()?,
        });
    }
    Ok((columns, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(config: &RunConfig) -> Report {
        let mut r = Report::new("t", config, &["x"]);
        r.push(Row::new(0, "a", true, "OK", vec![Some(1.0)]));
        r.push(Row::new(1, "b", false, "INVALID_CONFIG", vec![None]));
        r.note_worst("res", 1e-12);
        r.note_worst("res", 3e-12);
        r.note_worst("res", 2e-12);
        r
    }

    #[test]
    fn counts_and_worst() {
        let config = RunConfig::new(2, 2, 0).unwrap();
        let r = sample(&config);
        assert_eq!((r.trials, r.passed, r.failed), (2, 1, 1));
        assert_eq!(r.worst["res"], 3e-12);
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn merge_is_order_independent_in_aggregates() {
        let config = RunConfig::new(2, 2, 0).unwrap();
        let mut other = Report::new("t", &config, &["x"]);
        other.push(Row::new(0, "c", true, "OK", vec![Some(2.0)]));
        other.note_worst("res", 5e-12);
        other.check("c", false);
        let ab = Report::merge("m", 2, 0, vec![sample(&config), other.clone()]);
        let ba = Report::merge("m", 2, 0, vec![other, sample(&config)]);
        assert_eq!(
            (ab.trials, ab.passed, ab.failed),
            (ba.trials, ba.passed, ba.failed)
        );
        assert_eq!(ab.worst, ba.worst);
        assert_eq!(ab.checks, ba.checks);
        assert!(!ab.all_passed());
    }

    #[test]
    fn nan_is_never_hidden() {
        let config = RunConfig::new(2, 2, 0).unwrap();
        let mut r = Report::new("t", &config, &[]);
        r.note_worst("res", 1.0);
        r.note_worst("res", f64::NAN);
        r.note_worst("res", 2.0);
        assert_eq!(r.worst["res"], f64::MAX);
        let back = Report::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
