//! Component count of bond percolation on a binary tree, exact and sampled.
use rademacher::bounds::{exact_kolmogorov, exact_moments, second_order_bound, BoundMode, HolderTriple};
use rademacher::functional::Normalized;
use rademacher::harness::{run_rate, RateStudyConfig, StatisticSpec, TreeSpec};
use rademacher::stats::{percolation_statistic, TreeModel};

fn main() -> rademacher::Result<()> {
    let tree = TreeModel::regular(2, 3)?;
    let f = percolation_statistic(&tree, 0.5)?;
    let space = f.space();
    let (mean, var) = exact_moments(&space, &f)?;
    let nf = Normalized::new(&f, mean, var)?;
    let b = second_order_bound(&space, &nf, HolderTriple::standard(), BoundMode::Exact)?;
    println!("depth 3: {} edges, bound {:.4}, d_K {:.4}", tree.edge_count(), b.total, exact_kolmogorov(&space, &nf)?);

    let spec = StatisticSpec::Tree { tree: TreeSpec::Regular(2), p: 0.5 };
    let report = run_rate(&RateStudyConfig::new(spec, vec![6, 7, 8, 9], 20_000, 5))?;
    for (row, q) in report.rows.iter().skip(1).zip(&report.successive_ratios) {
        println!("depth {} total {:.4} ratio {q:.4}", row.n, row.total);
    }
    Ok(())
}
