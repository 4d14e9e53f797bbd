//! Runs every acceptance criterion at the full level, one PASS/FAIL line each,
//! then checks that a forced printed recurrence is caught.

use std::process::ExitCode;

use genuslab::enumerate::Variant;
use genuslab::verify::{run_criterion, Level, Options};

fn main() -> ExitCode {
    let opts = Options::new(Level::Full);
    let mut failed = Vec::new();
    for id in 1..=11 {
        let r = run_criterion(id, &opts);
        println!("{r}");
        if !r.passed {
            failed.push(id);
        }
    }

    let mut faulty = Options::new(Level::Fast);
    faulty.variant = Variant::Printed;
    let r = run_criterion(1, &faulty);
    let caught = !r.passed && r.detail.contains("Q(2,1)");
    println!("fault injection (printed recurrence) {}: {}", if caught { "caught" } else { "MISSED" }, r.detail);

    if failed.is_empty() && caught {
        println!("acceptance: all 11 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
