//! Exact bounds against the exact Kolmogorov distance on a small graph.
use rademacher::bounds::{second_order_bound, malliavin_stein_bound, exact_kolmogorov, exact_moments, BoundMode, HolderTriple};
use rademacher::functional::Normalized;
use rademacher::stats::{triangle_statistic, ErdosRenyiModel};

fn main() -> rademacher::Result<()> {
    let model = ErdosRenyiModel::with_p(6, 0.5)?;
    let space = model.space();
    let f = triangle_statistic(&model)?;
    let (mean, var) = exact_moments(&space, &f)?;
    let nf = Normalized::new(&f, mean, var)?;
    let b = second_order_bound(&space, &nf, HolderTriple::standard(), BoundMode::Exact)?;
    let ms = malliavin_stein_bound(&space, &nf)?;
    println!("mean {mean:.4} variance {var:.4}");
    for (i, t) in b.terms.iter().enumerate() {
        println!("A{} = {t:.6}", i + 1);
    }
    println!("seven-term total {:.6}", b.total);
    println!("four-term total  {:.6}", ms.total);
    println!("exact d_K        {:.6}", exact_kolmogorov(&space, &nf)?);
    Ok(())
}
