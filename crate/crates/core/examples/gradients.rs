//! First and second discrete gradients of the isolated-vertex count.
use rademacher::gradient::{gradient, second_gradient};
use rademacher::stats::{degree_statistic, ErdosRenyiModel};
use rademacher::{Configuration, Functional};

fn main() -> rademacher::Result<()> {
    let model = ErdosRenyiModel::with_p(5, 0.4)?;
    let space = model.space();
    let f = degree_statistic(&model, 0)?;
    let config = Configuration::from_mask(space.len(), 0b10_0000_0011);
    println!("F = {}", f.evaluate(&config));
    for k in 0..3 {
        let d = gradient(&space, &f, k)?;
        println!("D_{k} F = {:+.6}", d.evaluate(&config));
        for l in 0..space.len() {
            let dd = second_gradient(&space, &f, k, l)?.evaluate(&config);
            if dd != 0.0 {
                println!("  D_{l} D_{k} F = {dd:+.6}");
            }
        }
    }
    Ok(())
}
