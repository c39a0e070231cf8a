//! End-to-end acceptance checks. Each test writes one PASS/FAIL line to
//! stderr (bypassing output capture) and then asserts.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use rademacher::bounds::{
    exact_kolmogorov, exact_moments, malliavin_stein_bound, second_order_bound, BoundMode, HolderTriple,
};
use rademacher::functional::{Coordinate, Functional, Normalized};
use rademacher::harness::{
    run_rate, run_verify, to_json, triangle_gradient_laws, EdgeProbability, RateReport, RateStudyConfig,
    StatisticSpec, TreeSpec,
};
use rademacher::stats::{
    degree_statistic, percolation_statistic, subgraph_statistic, triangle_statistic, ErdosRenyiModel, SubgraphPattern,
    TreeModel,
};
use rademacher::RademacherSpace;

fn report(criterion: u32, passed: bool, detail: &str) {
    let line = format!("criterion {criterion:>2}: {} | {detail}\n", if passed { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

#[test]
fn criterion_01_identity_suite() {
    let start = Instant::now();
    let r = run_verify(8, 0).unwrap();
    let elapsed = start.elapsed();
    let worst = r
        .checks
        .iter()
        .filter(|c| c.tolerance <= 1e-9)
        .map(|c| (c.residual, c.name.as_str()))
        .fold((0.0, ""), |a, b| if b.0 > a.0 { b } else { a });
    let mehler = r.check("mehler_z_score").unwrap();
    let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let passed = r.passed && elapsed <= Duration::from_secs(60);
    report(
        1,
        passed,
        &format!(
            "{} identities, worst residual {:.2e} ({}), Mehler max z {:.2}, failed {:?}, {:.1}s",
            r.checks.len(),
            worst.0,
            worst.1,
            mehler.residual,
            failed,
            elapsed.as_secs_f64()
        ),
    );
    assert!(passed);
}

fn exact_check(space: &RademacherSpace, f: &dyn Functional) -> (f64, f64, f64) {
    let (mean, var) = exact_moments(space, f).unwrap();
    let nf = Normalized::new(f, mean, var).unwrap();
    let dk = exact_kolmogorov(space, &nf).unwrap();
    let ms = malliavin_stein_bound(space, &nf).unwrap().total;
    let so = second_order_bound(space, &nf, HolderTriple::standard(), BoundMode::Exact).unwrap().total;
    (dk, ms, so)
}

#[test]
fn criterion_02_exact_bound_validity() {
    let start = Instant::now();
    let mut cases: Vec<(String, RademacherSpace, Box<dyn Functional>)> = Vec::new();
    for n in [4, 5, 6] {
        for p in [0.3, 0.5] {
            let model = ErdosRenyiModel::with_p(n, p).unwrap();
            cases.push((format!("triangles n={n} p={p}"), model.space(), Box::new(triangle_statistic(&model).unwrap())));
            for d in 0..3 {
                cases.push((
                    format!("degree{d} n={n} p={p}"),
                    model.space(),
                    Box::new(degree_statistic(&model, d).unwrap()),
                ));
            }
            for pattern in ["0-1,1-2", "0-1,1-2,2-3,3-0", "0-1,2-3", "0-1,0-2,0-3"] {
                let pat = SubgraphPattern::parse(pattern).unwrap();
                if let Ok(s) = subgraph_statistic(&model, &pat) {
                    cases.push((format!("subgraph[{pattern}] n={n} p={p}"), model.space(), Box::new(s)));
                }
            }
        }
    }
    let irregular = TreeModel::parse("1 2\n1 3\n2 4\n2 5\n2 6\n3 7\n4 8\n4 9\n5 10\n7 11\n7 12\n7 13\n8 14\n11 15\n11 16\n12 17\n13 18\n")
        .unwrap();
    let trees = [
        ("tree2 depth 3", TreeModel::regular(2, 3).unwrap()),
        ("tree3 depth 2", TreeModel::regular(3, 2).unwrap()),
        ("tree4 depth 2", TreeModel::regular(4, 2).unwrap()),
        ("irregular tree", irregular),
    ];
    for (name, tree) in trees {
        assert!(tree.edge_count() <= 20);
        for p in [0.3, 0.5] {
            let stat = percolation_statistic(&tree, p).unwrap();
            cases.push((format!("{name} p={p}"), stat.space(), Box::new(stat)));
        }
    }
    let mut failures = Vec::new();
    let mut tightest = f64::INFINITY;
    for (name, space, f) in &cases {
        let (dk, ms, so) = exact_check(space, f.as_ref());
        tightest = tightest.min((ms - dk).min(so - dk));
        if ms < dk - 1e-9 || so < dk - 1e-9 {
            failures.push(format!("{name}: d_K {dk} vs {ms}, {so}"));
        }
    }
    let elapsed = start.elapsed();
    let passed = failures.is_empty() && elapsed <= Duration::from_secs(300);
    report(
        2,
        passed,
        &format!(
            "{} statistics, smallest margin {:.4}, violations {:?}, {:.1}s",
            cases.len(),
            tightest,
            failures,
            elapsed.as_secs_f64()
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_03_single_coin_fixture() {
    let space = RademacherSpace::symmetric(1).unwrap();
    let y = Coordinate::new(&space, 0).unwrap();
    let b = second_order_bound(&space, &y, HolderTriple::new(2.0, 4.0, 4.0).unwrap(), BoundMode::Exact).unwrap();
    let want = [0.0, 0.0, (2.0 * PI).sqrt() / 4.0, 1.0, 2.0, 0.0, 0.0];
    let terms_ok = b.terms.iter().zip(want).all(|(g, w)| within(*g, w, 1e-12));
    let passed = terms_ok && within(b.total, 3.626657, 1e-6);
    report(3, passed, &format!("terms {:?}, total {:.7}", b.terms, b.total));
    assert!(passed);
}

#[test]
fn criterion_04_triangle_gradient_law() {
    let (law, independence) = triangle_gradient_laws(&[6], 0.3).unwrap();
    let passed = law < 1e-12;
    report(
        4,
        passed,
        &format!("n=6 p=0.3: TV to Bin(4, 0.09) and Bernoulli(0.3) at most {law:.2e}; joint-law deviation {independence:.2e}"),
    );
    assert!(passed);
}

fn describe(r: &RateReport) -> String {
    let totals: Vec<String> = r.rows.iter().map(|row| format!("{}:{:.4}", row.n, row.total)).collect();
    format!(
        "bound slope {:.3} (R² {:.4}), d_K slope {}, totals [{}]",
        r.bound_fit.slope,
        r.bound_fit.r_squared,
        r.dk_fit.as_ref().map(|f| format!("{:.3}", f.slope)).unwrap_or_else(|| "n/a".into()),
        totals.join(", ")
    )
}

#[test]
fn criterion_05_triangle_rate_fixed_p() {
    let start = Instant::now();
    let spec = StatisticSpec::Triangles { edge: EdgeProbability::fixed(0.3) };
    let r = run_rate(&RateStudyConfig::new(spec, vec![16, 24, 32, 48, 64], 100_000, 5)).unwrap();
    let elapsed = start.elapsed();
    let slope = r.bound_fit.slope;
    let dk_slope = r.dk_fit.as_ref().unwrap().slope;
    let slope_ok = within(slope, -1.0, 0.2);
    let dk_ok = dk_slope <= slope + 0.3;
    let passed = slope_ok && dk_ok && r.monotonicity_violations <= 1 && elapsed <= Duration::from_secs(900);
    report(
        5,
        passed,
        &format!("target slope -1.0 ± 0.2; {}; {:.1}s", describe(&r), elapsed.as_secs_f64()),
    );
    assert!(passed);
}

#[test]
fn criterion_06_triangle_rate_alpha_06() {
    let spec = StatisticSpec::Triangles { edge: EdgeProbability { alpha: 0.6, theta: 1.0 } };
    let r = run_rate(&RateStudyConfig::new(spec, vec![16, 24, 32, 48, 64], 100_000, 6)).unwrap();
    let passed = within(r.bound_fit.slope, -0.45, 0.2) && r.monotonicity_violations <= 1;
    report(6, passed, &format!("target slope -0.45 ± 0.2, triple (2,4,4) from alpha; {}", describe(&r)));
    assert!(passed);
}

#[test]
fn criterion_07_isolated_vertices() {
    let spec = StatisticSpec::Degree { d: 0, edge: EdgeProbability { alpha: 1.0, theta: 1.0 } };
    let r = run_rate(&RateStudyConfig::new(spec, vec![32, 48, 64, 96], 100_000, 7)).unwrap();
    let passed = within(r.bound_fit.slope, -0.5, 0.15) && r.monotonicity_violations <= 1;
    report(7, passed, &format!("target slope -0.5 ± 0.15; {}", describe(&r)));
    assert!(passed);
}

#[test]
fn criterion_08_tree_percolation() {
    let spec = StatisticSpec::Tree { tree: TreeSpec::Regular(2), p: 0.5 };
    let r = run_rate(&RateStudyConfig::new(spec, vec![6, 7, 8, 9, 10], 100_000, 8)).unwrap();
    let target = 0.5f64.sqrt();
    let passed = r.successive_ratios.iter().all(|q| within(*q, target, 0.1));
    let ratios: Vec<String> = r.successive_ratios.iter().map(|q| format!("{q:.4}")).collect();
    report(8, passed, &format!("ratios [{}] vs {target:.4} ± 0.1; {}", ratios.join(", "), describe(&r)));
    assert!(passed);
}

#[test]
fn criterion_09_subgraph_generality() {
    let mut lines = Vec::new();
    let mut passed = true;
    for pattern in ["0-1,1-2", "0-1,1-2,2-3,3-0"] {
        let spec = StatisticSpec::Subgraph { pattern: pattern.into(), edge: EdgeProbability::fixed(0.3) };
        let r = run_rate(&RateStudyConfig::new(spec, vec![16, 24, 32, 48], 20_000, 9)).unwrap();
        let ok = within(r.bound_fit.slope, -1.0, 0.25) && r.monotonicity_violations <= 1;
        passed &= ok;
        lines.push(format!("[{pattern}] {} {}", if ok { "ok" } else { "out of range" }, describe(&r)));
    }
    report(9, passed, &format!("target slope -1.0 ± 0.25; {}", lines.join("; ")));
    assert!(passed);
}

#[test]
fn criterion_10_determinism() {
    let spec = StatisticSpec::Degree { d: 0, edge: EdgeProbability { alpha: 1.0, theta: 1.0 } };
    let config = RateStudyConfig::new(spec, vec![32, 48, 64, 96], 100_000, 7);
    let mut outputs = Vec::new();
    for threads in [1, 2, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let rate = pool.install(|| to_json(&run_rate(&config).unwrap()).unwrap());
        let verify = pool.install(|| to_json(&run_verify(6, 3).unwrap()).unwrap());
        outputs.push((rate, verify));
    }
    let passed = outputs.windows(2).all(|w| w[0] == w[1]);
    report(
        10,
        passed,
        &format!("criterion-7 rate report and verify report identical under 1, 2 and 8 threads: {passed}"),
    );
    assert!(passed);
}
