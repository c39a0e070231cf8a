//! Number of vertices of a prescribed degree in `G(n, p)`.

use statrs::distribution::{Binomial, Discrete};

use crate::error::{Error, Result};
use crate::functional::{Functional, GradientOracles, IndexSymmetry, TupleKind, TupleOrbit};
use crate::space::Configuration;

use super::er::{edge_tuple_orbits, ErdosRenyiModel};

/// `V_{n,d}`. Toggling edge `k` only moves the degrees of its two ends.
#[derive(Debug, Clone)]
pub struct DegreeCount {
    model: ErdosRenyiModel,
    d: usize,
    sqrt_pq: f64,
    pq: f64,
}

pub fn degree_statistic(model: &ErdosRenyiModel, d: usize) -> Result<DegreeCount> {
    if d >= model.n() {
        return Err(Error::OutOfRange(format!("degree {d} impossible with {} vertices", model.n())));
    }
    let pq = model.p() * (1.0 - model.p());
    Ok(DegreeCount { model: model.clone(), d, sqrt_pq: pq.sqrt(), pq })
}

impl DegreeCount {
    pub fn model(&self) -> &ErdosRenyiModel {
        &self.model
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    fn degrees(&self, config: &Configuration) -> Vec<usize> {
        let mut deg = vec![0; self.model.n()];
        for k in config.ones() {
            let (u, v) = self.model.edge(k);
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    #[inline]
    fn is_d(&self, a: usize) -> f64 {
        (a == self.d) as u8 as f64
    }

    fn first(&self, deg: &[usize], config: &Configuration, k: usize) -> f64 {
        let (u, v) = self.model.edge(k);
        let own = config.get(k) as usize;
        let raw: f64 = [u, v]
            .iter()
            .map(|&w| {
                let a = deg[w] - own;
                self.is_d(a + 1) - self.is_d(a)
            })
            .sum();
        self.sqrt_pq * raw
    }

    fn second(&self, deg: &[usize], config: &Configuration, k: usize, l: usize) -> f64 {
        if k == l || self.model.shared_vertices(k, l) != 1 {
            return 0.0;
        }
        let (a, b) = self.model.edge(k);
        let (c, d) = self.model.edge(l);
        let s = if a == c || a == d { a } else { b };
        let rest = deg[s] - config.get(k) as usize - config.get(l) as usize;
        self.pq * (self.is_d(rest + 2) - 2.0 * self.is_d(rest + 1) + self.is_d(rest))
    }
}

impl Functional for DegreeCount {
    fn index_count(&self) -> usize {
        self.model.edge_count()
    }

    fn evaluate(&self, config: &Configuration) -> f64 {
        self.degrees(config).iter().filter(|&&a| a == self.d).count() as f64
    }

    fn oracles(&self) -> Option<&dyn GradientOracles> {
        Some(self)
    }

    fn symmetry(&self) -> Option<&dyn IndexSymmetry> {
        Some(self)
    }

    /// Vertex indicators are dependent only through the edge joining them.
    fn known_moments(&self) -> Option<(f64, f64)> {
        let n = self.model.n();
        let p = self.model.p();
        let d = self.d as u64;
        let b = Binomial::new(p, (n - 1) as u64).ok()?.pmf(d);
        let rest = Binomial::new(p, (n - 2) as u64).ok()?;
        let joint = (1.0 - p) * rest.pmf(d).powi(2) + if d >= 1 { p * rest.pmf(d - 1).powi(2) } else { 0.0 };
        let nf = n as f64;
        let var = nf * b * (1.0 - b) + nf * (nf - 1.0) * (joint - b * b);
        Some((nf * b, var))
    }
}

impl GradientOracles for DegreeCount {
    fn gradient(&self, config: &Configuration, k: usize) -> f64 {
        self.first(&self.degrees(config), config, k)
    }

    fn second_gradient(&self, config: &Configuration, k: usize, l: usize) -> f64 {
        self.second(&self.degrees(config), config, k, l)
    }

    fn interactions(&self, k: usize) -> Vec<usize> {
        self.model.edges_where(k, |s| s == 1)
    }

    fn interacts(&self, k: usize, l: usize) -> bool {
        k != l && self.model.shared_vertices(k, l) == 1
    }

    fn evaluate_batch(
        &self,
        config: &Configuration,
        firsts: &[usize],
        seconds: &[(usize, usize)],
        first_out: &mut [f64],
        second_out: &mut [f64],
    ) -> f64 {
        let deg = self.degrees(config);
        for (o, &k) in first_out.iter_mut().zip(firsts) {
            *o = self.first(&deg, config, k);
        }
        for (o, &(k, l)) in second_out.iter_mut().zip(seconds) {
            *o = self.second(&deg, config, k, l);
        }
        deg.iter().filter(|&&a| a == self.d).count() as f64
    }
}

impl IndexSymmetry for DegreeCount {
    fn orbits(&self, kind: TupleKind) -> Vec<TupleOrbit> {
        edge_tuple_orbits(self.model.n(), kind, &|s| s == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Enumeration;
    use crate::gradient::{gradient, oracle_deviation, second_gradient};

    fn all_configs(m: usize) -> Vec<Configuration> {
        (0..1u64 << m).map(|mask| Configuration::from_mask(m, mask)).collect()
    }

    #[test]
    fn extreme_configurations() {
        let model = ErdosRenyiModel::with_p(6, 0.2).unwrap();
        let v0 = degree_statistic(&model, 0).unwrap();
        assert_eq!(v0.evaluate(&Configuration::empty(15)), 6.0);
        let v5 = degree_statistic(&model, 5).unwrap();
        assert_eq!(v5.evaluate(&Configuration::full(15)), 6.0);
        assert!(degree_statistic(&model, 6).is_err());
    }

    #[test]
    fn oracles_match_pathwise_and_are_bounded() {
        let model = ErdosRenyiModel::with_p(5, 0.2).unwrap();
        let space = model.space();
        let configs = all_configs(10);
        let scale = space.sqrt_pq(0);
        for d in 0..4 {
            let v = degree_statistic(&model, d).unwrap();
            assert!(oracle_deviation(&space, &v, &configs).unwrap() < 1e-12);
            for c in &configs {
                for k in 0..10 {
                    assert!(gradient(&space, &v, k).unwrap().evaluate(c).abs() <= 2.0 * scale + 1e-12);
                    for l in 0..10 {
                        let s = second_gradient(&space, &v, k, l).unwrap().evaluate(c);
                        assert!(s.abs() <= 2.0 * scale * scale + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn known_moments_match_enumeration() {
        let model = ErdosRenyiModel::with_p(5, 0.3).unwrap();
        let e = Enumeration::with_default_cap(&model.space()).unwrap();
        for d in 0..5 {
            let v = degree_statistic(&model, d).unwrap();
            let (mean, var) = e.mean_variance(&e.tabulate(&v));
            let (km, kv) = v.known_moments().unwrap();
            assert!((mean - km).abs() < 1e-10 && (var - kv).abs() < 1e-10, "d={d}");
        }
    }
}
