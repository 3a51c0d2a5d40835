use std::process::ExitCode;

use vdlab::verify::{self, deterministic_csv, CheckOutcome};

fn line(id: u32, passed: bool, name: &str, detail: &str) {
    println!("[{}] criterion {id:>2}: {name}: {detail}", if passed { "PASS" } else { "FAIL" });
}

fn main() -> ExitCode {
    let seed = verify::DEFAULT_SEED;
    let first: Vec<CheckOutcome> = verify::verify_all(seed);
    for o in &first {
        line(o.id, o.passed, o.name, &o.detail);
    }

    let second = verify::verify_all(seed);
    let differing: Vec<u32> = first
        .iter()
        .zip(&second)
        .filter(|(a, b)| deterministic_csv(a) != deterministic_csv(b) || a.passed != b.passed || a.detail != b.detail)
        .map(|(a, _)| a.id)
        .collect();
    let reproducible = differing.is_empty();
    line(
        11,
        reproducible,
        "same seed reproduces every CSV",
        &if reproducible {
            format!("{} checks identical across two runs with seed {seed}", first.len())
        } else {
            format!("checks {differing:?} differ")
        },
    );

    let failed = first.iter().filter(|o| !o.passed).count() + usize::from(!reproducible);
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
