//! Chaos expansion of the triangle count on K_4 and its reconstruction.
use rademacher::chaos::stroock_decompose;
use rademacher::stats::{triangle_statistic, ErdosRenyiModel};
use rademacher::{Configuration, Functional};

fn main() -> rademacher::Result<()> {
    let model = ErdosRenyiModel::with_p(4, 0.3)?;
    let space = model.space();
    let f = triangle_statistic(&model)?;
    let decomp = stroock_decompose(&space, &f)?;
    println!("mean {:.6}  variance {:.6}", decomp.mean(), decomp.variance());
    for order in 1..=3 {
        let kernel = decomp.kernel(order);
        println!("order {order}: {} nonzero entries, squared norm {:.6}", kernel.entries().count(), kernel.norm_squared());
    }
    let table = decomp.to_table();
    let config = Configuration::full(space.len());
    println!("F(all edges) = {}  reconstructed {:.12}", f.evaluate(&config), table[config.mask() as usize]);
    Ok(())
}
