//! Triangle counts in `G(n, p)`.

use crate::error::{Error, Result};
use crate::functional::{Functional, GradientOracles, IndexSymmetry, TupleKind, TupleOrbit};
use crate::space::Configuration;

use super::er::{edge_tuple_orbits, Adjacency, ErdosRenyiModel};

/// `T`, the number of triangles. `D_k T` counts the vertices joined to both
/// ends of edge `k`; `D_l D_k T` is the completing edge when `k` and `l`
/// share one vertex.
#[derive(Debug, Clone)]
pub struct TriangleCount {
    model: ErdosRenyiModel,
    sqrt_pq: f64,
    pq: f64,
}

pub fn triangle_statistic(model: &ErdosRenyiModel) -> Result<TriangleCount> {
    if model.n() < 3 {
        return Err(Error::OutOfRange(format!("triangle counts need n >= 3, got {}", model.n())));
    }
    let pq = model.p() * (1.0 - model.p());
    Ok(TriangleCount { model: model.clone(), sqrt_pq: pq.sqrt(), pq })
}

impl TriangleCount {
    pub fn model(&self) -> &ErdosRenyiModel {
        &self.model
    }

    fn count(&self, adj: &Adjacency) -> f64 {
        let n = self.model.n();
        let mut twice_three: usize = 0;
        for u in 0..n {
            for v in u + 1..n {
                if adj.has(u, v) {
                    twice_three += adj.common(u, v);
                }
            }
        }
        (twice_three / 3) as f64
    }

    fn first(&self, adj: &Adjacency, k: usize) -> f64 {
        let (u, v) = self.model.edge(k);
        self.sqrt_pq * adj.common(u, v) as f64
    }

    fn second(&self, adj: &Adjacency, k: usize, l: usize) -> f64 {
        match completing_edge(&self.model, k, l) {
            Some((a, b)) if adj.has(a, b) => self.pq,
            _ => 0.0,
        }
    }
}

/// For edges sharing exactly one vertex, the pair of their other endpoints.
pub(crate) fn completing_edge(model: &ErdosRenyiModel, k: usize, l: usize) -> Option<(usize, usize)> {
    if k == l {
        return None;
    }
    let (a, b) = model.edge(k);
    let (c, d) = model.edge(l);
    match (a == c, a == d, b == c, b == d) {
        (true, false, false, false) => Some((b, d)),
        (false, true, false, false) => Some((b, c)),
        (false, false, true, false) => Some((a, d)),
        (false, false, false, true) => Some((a, c)),
        _ => None,
    }
}

impl Functional for TriangleCount {
    fn index_count(&self) -> usize {
        self.model.edge_count()
    }

    fn evaluate(&self, config: &Configuration) -> f64 {
        self.count(&self.model.adjacency(config))
    }

    fn oracles(&self) -> Option<&dyn GradientOracles> {
        Some(self)
    }

    fn symmetry(&self) -> Option<&dyn IndexSymmetry> {
        Some(self)
    }

    /// `E T = C(n,3) p³`; two triangles are dependent only when they share an
    /// edge, with covariance `p⁵ − p⁶`.
    fn known_moments(&self) -> Option<(f64, f64)> {
        let n = self.model.n() as f64;
        let p = self.model.p();
        let c3 = n * (n - 1.0) * (n - 2.0) / 6.0;
        let var = c3 * (p.powi(3) - p.powi(6)) + c3 * 3.0 * (n - 3.0) * (p.powi(5) - p.powi(6));
        Some((c3 * p.powi(3), var))
    }
}

impl GradientOracles for TriangleCount {
    fn gradient(&self, config: &Configuration, k: usize) -> f64 {
        self.first(&self.model.adjacency(config), k)
    }

    fn second_gradient(&self, config: &Configuration, k: usize, l: usize) -> f64 {
        match completing_edge(&self.model, k, l) {
            Some((a, b)) if config.get(self.model.label(a, b).expect("valid pair")) => self.pq,
            _ => 0.0,
        }
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
        let adj = self.model.adjacency(config);
        for (o, &k) in first_out.iter_mut().zip(firsts) {
            *o = self.first(&adj, k);
        }
        for (o, &(k, l)) in second_out.iter_mut().zip(seconds) {
            *o = self.second(&adj, k, l);
        }
        self.count(&adj)
    }
}

impl IndexSymmetry for TriangleCount {
    fn orbits(&self, kind: TupleKind) -> Vec<TupleOrbit> {
        edge_tuple_orbits(self.model.n(), kind, &|s| s == 1)
    }
}
