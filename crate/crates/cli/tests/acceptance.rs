//! Acceptance criteria at their stated sizes and tolerances. Runs without
//! the test harness so that every criterion prints its verdict line.

use std::process::ExitCode;
use std::time::Instant;

use tslab_cli::commands::criteria;
use tslab_cli::RunConfig;

const SEED: u64 = 20_261_015;

fn main() -> ExitCode {
    let config = RunConfig::new(2, 1, SEED).expect("valid config");
    let mut all_ok = true;
    for c in criteria() {
        let start = Instant::now();
        let outcome = (c.run)(&config);
        let secs = start.elapsed().as_secs_f64();
        let in_budget = secs < c.budget;
        let line = match &outcome {
            Ok(report) => {
                let ok = report.all_passed() && in_budget;
                all_ok &= ok;
                let worst: Vec<String> = report
                    .worst
                    .iter()
                    .map(|(k, v)| format!("{k}={v:.2e}"))
                    .collect();
                format!(
                    "[{}] criterion {} {}: {}/{} trials passed, {secs:.2} s of {:.0} s{}{}",
                    if ok { "PASS" } else { "FAIL" },
                    c.id,
                    c.name,
                    report.passed,
                    report.trials,
                    c.budget,
                    if worst.is_empty() {
                        String::new()
                    } else {
                        format!(", worst {}", worst.join(" "))
                    },
                    if report.all_passed() {
                        ""
                    } else {
                        ", assertion failures"
                    },
                )
            }
            Err(err) => {
                all_ok = false;
                format!("[FAIL] criterion {} {}: harness error: {err}", c.id, c.name)
            }
        };
        println!("{line}");
        if let Ok(report) = &outcome {
            for row in report.rows.iter().filter(|r| !r.passed).take(5) {
                println!(
                    "    failed trial {} [{}]: {}",
                    row.trial, row.label, row.code
                );
            }
        }
    }
    println!(
        "acceptance: {}",
        if all_ok {
            "all criteria pass"
        } else {
            "FAILED"
        }
    );
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
