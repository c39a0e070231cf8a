//! Monte Carlo estimate of the bound on a graph too large to enumerate.
use rademacher::bounds::McParams;
use rademacher::harness::{run_bound, EdgeProbability, RunMode, StatisticSpec, TriplePolicy};

fn main() -> rademacher::Result<()> {
    let spec = StatisticSpec::Triangles { edge: EdgeProbability::fixed(0.3) };
    let r = run_bound(&spec, 40, RunMode::MonteCarlo, TriplePolicy::Auto, McParams::new(50_000, 1))?;
    let se = r.bound.stderrs.unwrap_or([0.0; 7]);
    for (i, (t, s)) in r.bound.terms.iter().zip(se).enumerate() {
        println!("A{} = {t:.5} ± {s:.5}", i + 1);
    }
    println!("total {:.5} ± {:.5}", r.bound.total, r.bound.total_stderr.unwrap_or(0.0));
    if let Some(dk) = r.empirical_dk {
        println!("empirical d_K {:.5} ± {:.5}", dk.value, dk.stderr);
    }
    Ok(())
}
