//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//! Pass criterion ids as arguments (for example `cargo test --test acceptance -- AC3 AC9`) to run a subset.

use nlkg_core::config::RunConfig;
use nlkg_core::suite::{self, EvolutionRuns, Outcome};
use nlkg_core::Result;
use std::process::ExitCode;
use std::sync::OnceLock;

fn runs(cfg: &RunConfig) -> Result<&'static EvolutionRuns> {
    static RUNS: OnceLock<EvolutionRuns> = OnceLock::new();
    if let Some(r) = RUNS.get() {
        return Ok(r);
    }
    let r = suite::evolution_runs(cfg)?;
    Ok(RUNS.get_or_init(|| r))
}

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let wanted: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC")).collect();
    type Check = fn(&RunConfig) -> Result<Outcome>;
    let checks: [(&str, Check); 12] = [
        ("AC1", |_| suite::criterion_1()),
        ("AC2", |_| suite::criterion_2()),
        ("AC3", |_| suite::criterion_3()),
        ("AC4", suite::criterion_4),
        ("AC5", suite::criterion_5),
        ("AC6", suite::criterion_6),
        ("AC7", suite::criterion_7),
        ("AC8", suite::criterion_8),
        ("AC9", |c| Ok(suite::criterion_9(runs(c)?))),
        ("AC10", |c| Ok(suite::criterion_10(runs(c)?))),
        ("AC11", suite::criterion_11),
        ("AC12", |c| suite::criterion_12(c, runs(c)?)),
    ];
    let mut failed = vec![];
    for (id, check) in checks {
        if !wanted.is_empty() && !wanted.iter().any(|w| w == id) {
            continue;
        }
        match check(&cfg) {
            Ok(o) => {
                println!("{} ({:.1}s)", o.line(), o.runtime_s);
                if !o.passed() {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("FAIL {id} error: {e}");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
