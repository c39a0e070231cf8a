//! Log-log decay of the bound for isolated vertices in G(n, 1/n).
use rademacher::harness::{run_rate, EdgeProbability, RateStudyConfig, StatisticSpec};

fn main() -> rademacher::Result<()> {
    let spec = StatisticSpec::Degree { d: 0, edge: EdgeProbability { alpha: 1.0, theta: 1.0 } };
    let report = run_rate(&RateStudyConfig::new(spec, vec![32, 48, 64, 96], 20_000, 3))?;
    for row in &report.rows {
        println!("n={:>3} total {:.4} d_K {:.4}", row.n, row.total, row.dk_emp);
    }
    println!("slope {:.3} (R² {:.4})", report.bound_fit.slope, report.bound_fit.r_squared);
    Ok(())
}
