// Every oracle-backed check on the shipped fixtures, including one with a
// deliberately overstated epsilon.

use splitchain::commands::{cmd_verify, VERIFY_FIXTURES};

pub fn run_example() -> splitchain::Result<()> {
    for name in VERIFY_FIXTURES {
        let report = cmd_verify(name, 0)?;
        println!("{name}: {}", if report.passed { "all checks pass" } else { "FAILURES" });
        for c in &report.checks {
            println!("  [{}] {}", if c.pass { "ok" } else { "fail" }, c.name);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(e.exit_code().into());
    }
}
