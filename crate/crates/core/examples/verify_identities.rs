//! Runs the identity suite and prints each residual.
use rademacher::harness::run_verify;

fn main() -> rademacher::Result<()> {
    let report = run_verify(8, 7)?;
    for c in &report.checks {
        println!("{:<44} {:>10.2e}  {}", c.name, c.residual, if c.passed { "ok" } else { "FAILED" });
    }
    println!("all passed: {}", report.passed);
    Ok(())
}
