//! Prints one PASS/FAIL line per acceptance criterion and exits nonzero if
//! any fails. Set `EBSTOP_ONLY=5,6` to run a subset.

use std::process::ExitCode;

use ebstop::harness::repro;

fn main() -> ExitCode {
    let ids: Vec<u8> = match std::env::var("EBSTOP_ONLY") {
        Ok(list) => list
            .split(',')
            .filter_map(|s| s.trim().parse().ok())
            .collect(),
        Err(_) => (1..=11).collect(),
    };
    let mut failed = 0;
    for id in ids {
        let outcome = repro::run_criterion(id);
        if !outcome.passed {
            failed += 1;
        }
        println!("{}", outcome.line());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
