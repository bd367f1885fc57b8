//! Acceptance criteria 1 to 11, one line each; exits nonzero if any fails.

use std::path::Path;
use std::process::ExitCode;

use dirac_jump_cli::acceptance;

fn main() -> ExitCode {
    let mut results = acceptance::run_numerical();
    results.push(acceptance::self_test_binary(Path::new(env!("CARGO_BIN_EXE_dirac-jump"))));
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| format!("C{}", r.id)).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
