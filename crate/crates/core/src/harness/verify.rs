//! Randomized identity suite over small instances.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{exact_kolmogorov, holder_select, malliavin_stein_bound, second_order_bound, BoundMode};
use crate::chaos::{
    decompose_table, divergence_of_decompositions, gradient_via_chaos, mehler_estimate, multiple_integral,
    ou_transform, ChaosDecomposition, Kernel, OuMode,
};
use crate::error::Result;
use crate::exact::Enumeration;
use crate::functional::{Functional, Normalized, TableFunctional};
use crate::gradient::{gradient_table, oracle_deviation};
use crate::montecarlo::{derive_seed, sample_rng};
use crate::space::{Configuration, RademacherSpace};
use crate::stats::{
    degree_statistic, percolation_statistic, subgraph_statistic, triangle_statistic, ErdosRenyiModel, SubgraphPattern,
    TreeModel,
};

/// Residuals below this pass; the Mehler check compares z-scores instead.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;
const MEHLER_Z: f64 = 4.0;
const INSTANCES: usize = 4;

/// Table of `D_k F` from the table of `F`.
pub type GradientFn = fn(&RademacherSpace, &[f64], usize) -> Vec<f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub cap: usize,
    pub checks: Vec<IdentityCheck>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Instance {
    space: RademacherSpace,
    enumeration: Enumeration,
    table: Vec<f64>,
    other: Vec<f64>,
}

fn random_instance(seed: u64, i: usize, max_m: usize) -> Result<Instance> {
    let mut rng = sample_rng(seed, i as u64);
    let m = rng.random_range(2..=max_m);
    let probs: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..0.9)).collect();
    let space = RademacherSpace::new(probs)?;
    let enumeration = Enumeration::new(&space, max_m)?;
    let size = enumeration.size();
    let table = (0..size).map(|_| rng.random_range(-2.0..2.0)).collect();
    let other = (0..size).map(|_| rng.random_range(-2.0..2.0)).collect();
    Ok(Instance { space, enumeration, table, other })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn centred(e: &Enumeration, table: &[f64]) -> Vec<f64> {
    let mean = e.expect_table(table);
    table.iter().map(|v| v - mean).collect()
}

/// Runs every identity with the reference gradient.
pub fn run_verify(cap: usize, seed: u64) -> Result<VerifyReport> {
    run_verify_with(cap, seed, gradient_table)
}

/// Runs every identity, using `grad` wherever the suite differentiates a
/// table directly.
pub fn run_verify_with(cap: usize, seed: u64, grad: GradientFn) -> Result<VerifyReport> {
    let max_m = cap.clamp(2, 8);
    let instances = (0..INSTANCES)
        .map(|i| random_instance(derive_seed(seed, 1), i, max_m))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    let mut push = |name: &str, residual: f64, tolerance: f64| {
        checks.push(IdentityCheck {
            name: name.into(),
            residual,
            tolerance,
            passed: residual.is_finite() && residual < tolerance,
        });
    };

    let mut worst = [0.0f64; 16];
    let mut mehler_z = 0.0f64;
    for (idx, inst) in instances.iter().enumerate() {
        let Instance { space, enumeration: e, table, other } = inst;
        let m = space.len();
        let size = e.size();
        let x = |mask: usize, k: usize| if mask >> k & 1 == 1 { 1.0 } else { -1.0 };

        // gradient independence and the product formula
        let product: Vec<f64> = table.iter().zip(other).map(|(a, b)| a * b).collect();
        for k in 0..m {
            let df = grad(space, table, k);
            let dg = grad(space, other, k);
            let dfg = grad(space, &product, k);
            let bit = 1 << k;
            for w in 0..size {
                worst[0] = worst[0].max((df[w] - df[w ^ bit]).abs());
                let rhs = df[w] * other[w] + table[w] * dg[w] - x(w, k) / space.sqrt_pq(k) * df[w] * dg[w];
                worst[1] = worst[1].max((dfg[w] - rhs).abs());
            }
            for l in 0..m {
                let kl = grad(space, &df, l);
                let lk = grad(space, &grad(space, table, l), k);
                worst[2] = worst[2].max(max_abs_diff(&kl, &lk));
            }
        }

        // linearity of expectation
        let combo: Vec<f64> = table.iter().zip(other).map(|(a, b)| 1.5 * a - 0.25 * b).collect();
        worst[3] = worst[3]
            .max((e.expect_table(&combo) - 1.5 * e.expect_table(table) + 0.25 * e.expect_table(other)).abs());

        // reconstruction through multiple integrals evaluated pointwise
        let decomp = decompose_table(space, table.clone());
        let kernels = decomp.kernels();
        let integrals = kernels.iter().map(|k| multiple_integral(space, k)).collect::<Result<Vec<_>>>()?;
        let mut config = Configuration::empty(m);
        for (w, &value) in table.iter().enumerate() {
            config.set_mask(w as u64);
            let rebuilt = decomp.mean() + integrals.iter().map(|j| j.evaluate(&config)).sum::<f64>();
            worst[4] = worst[4].max((rebuilt - value).abs());
        }

        // isometry with random sparse kernels
        let mut rng = sample_rng(derive_seed(seed, 2), idx as u64);
        let orders = m.min(3);
        let random_kernel = |rng: &mut rand_chacha::ChaCha8Rng, order: usize| -> Result<Kernel> {
            let mut k = Kernel::new(order);
            for _ in 0..3 {
                let mut tuple: Vec<usize> = Vec::new();
                while tuple.len() < order {
                    let i = rng.random_range(0..m);
                    if !tuple.contains(&i) {
                        tuple.push(i);
                    }
                }
                k.insert(&tuple, rng.random_range(-1.0..1.0))?;
            }
            Ok(k)
        };
        let ks = (1..=orders).map(|n| random_kernel(&mut rng, n)).collect::<Result<Vec<_>>>()?;
        let ks2 = (1..=orders).map(|n| random_kernel(&mut rng, n)).collect::<Result<Vec<_>>>()?;
        let tabs: Vec<Vec<f64>> = ks.iter().map(|k| Ok(e.tabulate(&multiple_integral(space, k)?))).collect::<Result<_>>()?;
        let tabs2: Vec<Vec<f64>> =
            ks2.iter().map(|k| Ok(e.tabulate(&multiple_integral(space, k)?))).collect::<Result<_>>()?;
        for (a, ka) in tabs.iter().zip(&ks) {
            for (b, kb) in tabs2.iter().zip(&ks2) {
                let lhs = e.expect(|w| a[w] * b[w]);
                let rhs = if ka.order() == kb.order() { factorial(ka.order()) * ka.inner(kb) } else { 0.0 };
                worst[5] = worst[5].max((lhs - rhs).abs());
            }
        }

        // variance identity and Poincaré
        let (_, var) = e.mean_variance(table);
        let chaos_var: f64 = kernels.iter().map(|k| factorial(k.order()) * k.norm_squared()).sum();
        worst[6] = worst[6].max((var - chaos_var).abs());
        let energy: f64 = (0..m)
            .map(|k| {
                let g = grad(space, table, k);
                e.expect(|w| g[w] * g[w])
            })
            .sum();
        worst[7] = worst[7].max(var - energy);

        // −δD = L
        let grads: Vec<ChaosDecomposition> =
            (0..m).map(|k| decompose_table(space, grad(space, table, k))).collect();
        let minus_delta: Vec<f64> = divergence_of_decompositions(&grads)?.to_table().iter().map(|v| -v).collect();
        let generator = ou_transform(&decomp, OuMode::Generator)?.to_table();
        worst[8] = worst[8].max(max_abs_diff(&minus_delta, &generator));

        // integration by parts for centred F
        let fc = centred(e, table);
        let cdec = centred_decomposition(space, &fc)?;
        let inv = ou_transform(&cdec, OuMode::Inverse)?.to_table();
        let dinv: Vec<Vec<f64>> = (0..m).map(|k| grad(space, &inv, k)).collect();
        let tests: [fn(f64) -> f64; 3] = [|v| v, |v| v * v, |v| v.tanh()];
        for phi in tests {
            let phif: Vec<f64> = fc.iter().map(|&v| phi(v)).collect();
            let lhs = e.expect(|w| fc[w] * phif[w]);
            let rhs: f64 = (0..m)
                .map(|k| {
                    let d = grad(space, &phif, k);
                    e.expect(|w| -d[w] * dinv[k][w])
                })
                .sum();
            worst[9] = worst[9].max((lhs - rhs).abs());
        }

        // adjointness for u_k = (pq)^{-1/2} D_kF |D_k L⁻¹F|
        let dfc: Vec<Vec<f64>> = (0..m).map(|k| grad(space, &fc, k)).collect();
        let u: Vec<Vec<f64>> = (0..m)
            .map(|k| (0..size).map(|w| dfc[k][w] * dinv[k][w].abs() / space.sqrt_pq(k)).collect())
            .collect();
        let delta_u = divergence_table(space, &u)?;
        let mut levels: Vec<f64> = fc.clone();
        levels.sort_by(|a, b| a.total_cmp(b));
        levels.dedup();
        for &level in &levels {
            let ind: Vec<f64> = fc.iter().map(|&v| (v > level) as u8 as f64).collect();
            let lhs = e.expect(|w| ind[w] * delta_u[w]);
            let rhs: f64 = (0..m)
                .map(|k| {
                    let d = grad(space, &ind, k);
                    e.expect(|w| d[w] * u[k][w])
                })
                .sum();
            worst[10] = worst[10].max((lhs - rhs).abs());
        }

        // Skorohod isometry for u_k not depending on X_k
        let mut rng = sample_rng(derive_seed(seed, 3), idx as u64);
        let v: Vec<Vec<f64>> = (0..m)
            .map(|k| {
                let raw: Vec<f64> = (0..size).map(|_| rng.random_range(-1.0..1.0)).collect();
                let bit = 1 << k;
                (0..size).map(|w| space.q(k) * raw[w & !bit] + space.p(k) * raw[w | bit]).collect()
            })
            .collect();
        let delta_v = divergence_table(space, &v)?;
        let lhs = e.expect(|w| delta_v[w] * delta_v[w]);
        let mut rhs: f64 = (0..m).map(|k| e.expect(|w| v[k][w] * v[k][w])).sum();
        for k in 0..m {
            for l in 0..m {
                let a = grad(space, &v[l], k);
                let b = grad(space, &v[k], l);
                rhs += e.expect(|w| a[w] * b[w]);
            }
        }
        worst[11] = worst[11].max((lhs - rhs).abs());

        // coefficients of −D_k L⁻¹F against those of D_kF
        let inv_dec = ou_transform(&cdec, OuMode::Inverse)?;
        for k in 0..m {
            let lhs = gradient_via_chaos(&inv_dec, k)?;
            let rhs = gradient_via_chaos(&cdec, k)?;
            for (mask, (a, b)) in lhs.coefficients().iter().zip(rhs.coefficients()).enumerate() {
                let order = mask.count_ones() as f64;
                worst[12] = worst[12].max((-a - b / (order + 1.0)).abs());
            }
        }

        // contraction for first and second gradients
        for alpha in 1..=4 {
            let a = alpha as f64;
            for k in 0..m {
                let lhs = e.expect(|w| dinv[k][w].abs().powf(a));
                let rhs = e.expect(|w| dfc[k][w].abs().powf(a));
                worst[13] = worst[13].max(lhs - rhs);
                for l in 0..m {
                    let d2i = grad(space, &dinv[k], l);
                    let d2f = grad(space, &dfc[k], l);
                    let lhs = e.expect(|w| d2i[w].abs().powf(a));
                    let rhs = e.expect(|w| d2f[w].abs().powf(a));
                    worst[13] = worst[13].max(lhs - rhs);
                }
            }
        }

        // Mehler's formula against the chaos semigroup
        let f = TableFunctional::new(m, table.clone())?;
        for (j, t) in [0.1, 0.5, 1.0].into_iter().enumerate() {
            let exact = ou_transform(&decomp, OuMode::Semigroup(t))?.to_table();
            let base_mask = (idx * 7 + j * 3) % size;
            let base = Configuration::from_mask(m, base_mask as u64);
            let est = mehler_estimate(space, &f, t, &base, 4000, derive_seed(seed, 10 + j as u64))?;
            let z = (est.estimate - exact[base_mask]).abs() / est.stderr.max(1e-300);
            mehler_z = mehler_z.max(z);
        }
    }

    push("gradient_independence", worst[0], IDENTITY_TOLERANCE);
    push("product_formula", worst[1], IDENTITY_TOLERANCE);
    push("second_gradient_symmetry", worst[2], IDENTITY_TOLERANCE);
    push("expectation_linearity", worst[3], IDENTITY_TOLERANCE);
    push("stroock_reconstruction", worst[4], IDENTITY_TOLERANCE);
    push("isometry", worst[5], IDENTITY_TOLERANCE);
    push("variance_identity", worst[6], IDENTITY_TOLERANCE);
    push("poincare", worst[7], IDENTITY_TOLERANCE);
    push("minus_divergence_gradient_is_generator", worst[8], IDENTITY_TOLERANCE);
    push("integration_by_parts", worst[9], IDENTITY_TOLERANCE);
    push("adjointness", worst[10], IDENTITY_TOLERANCE);
    push("skorohod_isometry", worst[11], IDENTITY_TOLERANCE);
    push("integral_representation", worst[12], IDENTITY_TOLERANCE);
    push("contraction", worst[13], IDENTITY_TOLERANCE);
    push("mehler_z_score", mehler_z, MEHLER_Z);

    let stats = statistics_checks(seed, max_m)?;
    for (name, residual) in stats {
        push(&name, residual, IDENTITY_TOLERANCE);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { seed, cap, checks, passed })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn centred_decomposition(space: &RademacherSpace, centred: &[f64]) -> Result<ChaosDecomposition> {
    let mut coeffs = decompose_table(space, centred.to_vec()).coefficients().to_vec();
    coeffs[0] = 0.0;
    ChaosDecomposition::from_coefficients(space, coeffs)
}

fn divergence_table(space: &RademacherSpace, u: &[Vec<f64>]) -> Result<Vec<f64>> {
    let decomps: Vec<ChaosDecomposition> = u.iter().map(|uk| decompose_table(space, uk.clone())).collect();
    Ok(divergence_of_decompositions(&decomps)?.to_table())
}

/// Oracle fidelity, the triangle gradient laws and bound validity.
fn statistics_checks(seed: u64, max_m: usize) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();

    let model = ErdosRenyiModel::with_p(4, 0.3)?;
    let space = model.space();
    let configs: Vec<Configuration> = (0..1u64 << space.len()).map(|w| Configuration::from_mask(space.len(), w)).collect();
    let mut fidelity = 0.0f64;
    fidelity = fidelity.max(oracle_deviation(&space, &triangle_statistic(&model)?, &configs)?);
    for d in 0..3 {
        fidelity = fidelity.max(oracle_deviation(&space, &degree_statistic(&model, d)?, &configs)?);
    }
    for pattern in [SubgraphPattern::path(3)?, SubgraphPattern::cycle(4)?, SubgraphPattern::parse("0-1,2-3")?] {
        fidelity = fidelity.max(oracle_deviation(&space, &subgraph_statistic(&model, &pattern)?, &configs)?);
    }
    let tree = TreeModel::regular(2, 2)?;
    let perc = percolation_statistic(&tree, 0.4)?;
    let tspace = perc.space();
    let tconfigs: Vec<Configuration> =
        (0..1u64 << tspace.len()).map(|w| Configuration::from_mask(tspace.len(), w)).collect();
    fidelity = fidelity.max(oracle_deviation(&tspace, &perc, &tconfigs)?);
    out.push(("oracle_fidelity".to_string(), fidelity));

    let (law, independence) = triangle_gradient_laws(&[5, 6], 0.3)?;
    out.push(("triangle_gradient_law".to_string(), law));
    out.push(("triangle_second_gradient_independence".to_string(), independence));

    // bound validity on a random normalized functional and a triangle count
    let mut rng = sample_rng(derive_seed(seed, 4), 0);
    let m = max_m.min(6);
    let space = RademacherSpace::new((0..m).map(|_| rng.random_range(0.1..0.9)).collect())?;
    let e = Enumeration::with_default_cap(&space)?;
    let raw: Vec<f64> = (0..e.size()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let (mean, var) = e.mean_variance(&raw);
    let f = TableFunctional::new(m, raw.iter().map(|v| (v - mean) / var.sqrt()).collect())?;
    let mut gap = 0.0f64;
    let triple = holder_select(0.0)?;
    let dk = exact_kolmogorov(&space, &f)?;
    gap = gap.max(dk - malliavin_stein_bound(&space, &f)?.total);
    gap = gap.max(dk - second_order_bound(&space, &f, triple, BoundMode::Exact)?.total);
    let t = triangle_statistic(&model)?;
    let (mean, var) = crate::bounds::exact_moments(&model.space(), &t)?;
    let nt = Normalized::new(&t, mean, var)?;
    let dk = exact_kolmogorov(&model.space(), &nt)?;
    gap = gap.max(dk - malliavin_stein_bound(&model.space(), &nt)?.total);
    gap = gap.max(dk - second_order_bound(&model.space(), &nt, triple, BoundMode::Exact)?.total);
    out.push(("bound_validity".to_string(), gap.max(0.0)));
    Ok(out)
}

/// Total-variation distances of the scaled triangle gradient to
/// `Bin(n−2, p²)` and of the scaled second gradient to `Bernoulli(p)`
/// (largest over edges and sizes), and the largest deviation of the joint
/// law of `(D_l D_k F, D_l D_j F)` from the product of its marginals.
pub fn triangle_gradient_laws(sizes: &[usize], p: f64) -> Result<(f64, f64)> {
    use statrs::distribution::{Binomial, Discrete};
    let mut law = 0.0f64;
    let mut independence = 0.0f64;
    for &n in sizes {
        let model = ErdosRenyiModel::with_p(n, p)?;
        let space = model.space();
        let t = triangle_statistic(&model)?;
        let e = Enumeration::with_default_cap(&space)?;
        let table = e.tabulate(&t);
        let pq = p * (1.0 - p);
        let binom = Binomial::new(p * p, (n - 2) as u64).map_err(|err| crate::Error::Invalid(err.to_string()))?;
        for k in 0..space.len() {
            let g = gradient_table(&space, &table, k);
            let raw: Vec<f64> = g.iter().map(|v| v / pq.sqrt()).collect();
            let scaled: Vec<f64> = raw.iter().map(|v| v.round()).collect();
            law = law.max(max_abs_diff(&scaled, &raw));
            law = law.max(tv_distance(&e.distribution(&scaled), |v| binom.pmf(v as u64), n - 1));

            let nbrs = model.interaction_neighborhood(k)?;
            let seconds: Vec<Vec<f64>> = nbrs
                .iter()
                .map(|&l| {
                    let raw: Vec<f64> = gradient_table(&space, &g, l).iter().map(|v| v / pq).collect();
                    let scaled: Vec<f64> = raw.iter().map(|v| v.round()).collect();
                    law = law.max(max_abs_diff(&scaled, &raw));
                    scaled
                })
                .collect();
            for h in &seconds {
                let bernoulli = |v: i64| match v {
                    1 => p,
                    0 => 1.0 - p,
                    _ => 0.0,
                };
                law = law.max(tv_distance(&e.distribution(h), bernoulli, 2));
            }
            if n != sizes[0] {
                continue;
            }
            // joint laws of pairs of second gradients through edge k
            for a in 0..seconds.len() {
                for b in a + 1..seconds.len() {
                    let (ha, hb) = (&seconds[a], &seconds[b]);
                    for va in [0.0, 1.0] {
                        let pa = e.expect(|w| (ha[w] == va) as u8 as f64);
                        for vb in [0.0, 1.0] {
                            let joint = e.expect(|w| (ha[w] == va && hb[w] == vb) as u8 as f64);
                            let pb = e.expect(|w| (hb[w] == vb) as u8 as f64);
                            independence = independence.max((joint - pa * pb).abs());
                        }
                    }
                }
            }
        }
    }
    Ok((law, independence))
}

fn tv_distance(dist: &[(f64, f64)], pmf: impl Fn(i64) -> f64, support: usize) -> f64 {
    let mut total = 0.0;
    let mut seen = vec![false; support];
    for &(v, w) in dist {
        let iv = v as i64;
        if v != iv as f64 || iv < 0 || iv as usize >= support {
            total += w;
            continue;
        }
        seen[iv as usize] = true;
        total += (w - pmf(iv)).abs();
    }
    for (i, s) in seen.iter().enumerate() {
        if !s {
            total += pmf(i as i64);
        }
    }
    total / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let report = run_verify(8, 0).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(report.passed);
        assert!(report.check("product_formula").is_some());
    }

    #[test]
    fn faulty_gradient_breaks_the_product_formula() {
        fn unscaled(_: &RademacherSpace, table: &[f64], k: usize) -> Vec<f64> {
            let bit = 1usize << k;
            (0..table.len()).map(|w| table[w | bit] - table[w & !bit]).collect()
        }
        let report = run_verify_with(6, 1, unscaled).unwrap();
        assert!(!report.passed);
        assert!(!report.check("product_formula").unwrap().passed);
    }

    #[test]
    fn tv_distance_examples() {
        assert_eq!(tv_distance(&[(0.0, 0.5), (1.0, 0.5)], |_| 0.5, 2), 0.0);
        assert!((tv_distance(&[(0.0, 1.0)], |v| if v == 1 { 1.0 } else { 0.0 }, 2) - 1.0).abs() < 1e-15);
    }
}
