//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;

use slant::selfcheck::run_all;

fn main() -> ExitCode {
    let mut failed = 0;
    for c in run_all() {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {} ({})", c.number, c.name, c.detail);
        if !c.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
