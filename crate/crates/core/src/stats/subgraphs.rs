//! Copies of a fixed pattern graph in `G(n, p)`.

use crate::error::{Error, Result};
use crate::functional::{Functional, GradientOracles, IndexSymmetry, TupleKind, TupleOrbit};
use crate::space::Configuration;

use super::er::{edge_tuple_orbits, Adjacency, ErdosRenyiModel};

/// A simple undirected pattern graph on vertices `0..v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphPattern {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl SubgraphPattern {
    pub fn new(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::Invalid("pattern needs at least one edge".into()));
        }
        if vertices > 8 {
            return Err(Error::OutOfRange(format!("patterns are limited to 8 vertices, got {vertices}")));
        }
        let mut norm: Vec<(usize, usize)> = Vec::new();
        for &(a, b) in edges {
            if a == b || a >= vertices || b >= vertices {
                return Err(Error::Invalid(format!("bad pattern edge ({a}, {b})")));
            }
            let e = (a.min(b), a.max(b));
            if norm.contains(&e) {
                return Err(Error::Invalid(format!("repeated pattern edge ({a}, {b})")));
            }
            norm.push(e);
        }
        Ok(Self { vertices, edges: norm })
    }

    pub fn edge() -> Self {
        Self::new(2, &[(0, 1)]).unwrap()
    }

    pub fn triangle() -> Self {
        Self::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    /// Path with `v` vertices.
    pub fn path(v: usize) -> Result<Self> {
        let edges: Vec<_> = (1..v).map(|i| (i - 1, i)).collect();
        Self::new(v, &edges)
    }

    /// Cycle with `v ≥ 3` vertices.
    pub fn cycle(v: usize) -> Result<Self> {
        if v < 3 {
            return Err(Error::OutOfRange(format!("a cycle needs 3 vertices, got {v}")));
        }
        let edges: Vec<_> = (0..v).map(|i| (i, (i + 1) % v)).collect();
        Self::new(v, &edges)
    }

    /// Parses `a-b,c-d,...`; the vertex count is one more than the largest label.
    pub fn parse(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (a, b) = part
                .split_once('-')
                .ok_or_else(|| Error::Invalid(format!("pattern edge `{part}` is not of the form a-b")))?;
            let parse = |s: &str| {
                s.trim().parse::<usize>().map_err(|e| Error::Invalid(format!("pattern vertex `{s}`: {e}")))
            };
            edges.push((parse(a)?, parse(b)?));
        }
        let v = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        Self::new(v, &edges)
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// `|Aut(Γ)|` by brute force over vertex permutations.
    pub fn automorphisms(&self) -> usize {
        let mut perm: Vec<usize> = (0..self.vertices).collect();
        let mut count = 0;
        loop {
            if self.edges.iter().all(|&(a, b)| self.has_edge(perm[a], perm[b])) {
                count += 1;
            }
            if !next_permutation(&mut perm) {
                return count;
            }
        }
    }

    fn has_path_of_two(&self) -> bool {
        (0..self.vertices).any(|v| self.edges.iter().filter(|&&(a, b)| a == v || b == v).count() >= 2)
    }

    fn has_disjoint_edges(&self) -> bool {
        self.edges.iter().enumerate().any(|(i, &(a, b))| {
            self.edges[i + 1..].iter().any(|&(c, d)| a != c && a != d && b != c && b != d)
        })
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Backtracking embedder. Pattern vertices are placed in an order where each
/// vertex after the first of its component has an earlier neighbour.
#[derive(Debug, Clone)]
struct Embedder {
    order: Vec<usize>,
    /// For each position, the earlier positions adjacent to it in the pattern.
    back: Vec<Vec<usize>>,
}

impl Embedder {
    fn new(pattern: &SubgraphPattern, first: &[usize]) -> Self {
        let v = pattern.vertices;
        let mut order: Vec<usize> = Vec::with_capacity(v);
        for &f in first {
            if !order.contains(&f) {
                order.push(f);
            }
        }
        while order.len() < v {
            let next = (0..v)
                .filter(|u| !order.contains(u))
                .max_by_key(|&u| {
                    let links = order.iter().filter(|&&w| pattern.has_edge(u, w)).count();
                    (links, usize::MAX - u)
                })
                .unwrap();
            order.push(next);
        }
        let back = (0..v)
            .map(|i| (0..i).filter(|&j| pattern.has_edge(order[i], order[j])).collect())
            .collect();
        Self { order, back }
    }

    /// Number of injective maps sending every pattern edge to a present edge,
    /// with the first `fixed.len()` positions pinned to the given host
    /// vertices.
    fn count(&self, adj: &Adjacency, fixed: &[usize]) -> usize {
        let mut image = vec![0usize; self.order.len()];
        for (i, &h) in fixed.iter().enumerate() {
            if image[..i].contains(&h) || self.back[i].iter().any(|&j| !adj.has(h, image[j])) {
                return 0;
            }
            image[i] = h;
        }
        let words = adj.n().div_ceil(64);
        let mut scratch = vec![0u64; words * (self.order.len() - fixed.len())];
        self.extend(adj, &mut image, fixed.len(), &mut scratch)
    }

    /// `scratch` holds one candidate set per remaining position.
    fn extend(&self, adj: &Adjacency, image: &mut [usize], pos: usize, scratch: &mut [u64]) -> usize {
        let v = self.order.len();
        if pos == v {
            return 1;
        }
        let n = adj.n();
        let words = n.div_ceil(64);
        let (cand, rest) = scratch.split_at_mut(words);
        if self.back[pos].is_empty() {
            cand.fill(u64::MAX);
            if n % 64 != 0 {
                cand[words - 1] = (1u64 << (n % 64)) - 1;
            }
        } else {
            cand.copy_from_slice(adj.row(image[self.back[pos][0]]));
            for &j in &self.back[pos][1..] {
                for (w, r) in cand.iter_mut().zip(adj.row(image[j])) {
                    *w &= r;
                }
            }
        }
        for &h in &image[..pos] {
            cand[h >> 6] &= !(1u64 << (h & 63));
        }
        if pos + 1 == v {
            return cand.iter().map(|w| w.count_ones() as usize).sum();
        }
        let mut total = 0;
        for wi in 0..words {
            let mut w = cand[wi];
            while w != 0 {
                let h = wi * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                image[pos] = h;
                total += self.extend(adj, image, pos + 1, rest);
            }
        }
        total
    }
}

/// `S`, the number of subgraphs of `G(n, p)` isomorphic to the pattern.
#[derive(Debug, Clone)]
pub struct SubgraphCount {
    model: ErdosRenyiModel,
    pattern: SubgraphPattern,
    aut: f64,
    full: Embedder,
    /// For each pattern edge `(a, b)`, an embedder placing `a` then `b` first.
    through: Vec<Embedder>,
    /// For each ordered pair of distinct pattern edges, an embedder placing
    /// their endpoints first.
    pairs: Vec<((usize, usize), (usize, usize), Embedder)>,
    near: bool,
    far: bool,
    sqrt_pq: f64,
    pq: f64,
    moments: Option<(f64, f64)>,
}

pub fn subgraph_statistic(model: &ErdosRenyiModel, pattern: &SubgraphPattern) -> Result<SubgraphCount> {
    if pattern.vertices > model.n() {
        return Err(Error::OutOfRange(format!(
            "pattern with {} vertices does not fit in {} vertices",
            pattern.vertices,
            model.n()
        )));
    }
    let through = pattern.edges.iter().map(|&(a, b)| Embedder::new(pattern, &[a, b])).collect();
    let mut pairs = Vec::new();
    for &e in &pattern.edges {
        for &f in &pattern.edges {
            if e != f {
                pairs.push((e, f, Embedder::new(pattern, &[e.0, e.1, f.0, f.1])));
            }
        }
    }
    let pq = model.p() * (1.0 - model.p());
    Ok(SubgraphCount {
        model: model.clone(),
        pattern: pattern.clone(),
        aut: pattern.automorphisms() as f64,
        full: Embedder::new(pattern, &[]),
        through,
        pairs,
        near: pattern.has_path_of_two(),
        far: pattern.has_disjoint_edges(),
        sqrt_pq: pq.sqrt(),
        pq,
        moments: exact_moments(pattern, model.n(), model.p()),
    })
}

/// Maps enumerated for the overlap profile are capped at this many.
const OVERLAP_MAP_CAP: f64 = 5e6;

fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| n.saturating_sub(i) as f64).product()
}

/// Mean and variance of the copy count in `G(n, p)`.
///
/// `Var = Σ_{H, H'} (p^{|E(H) ∪ E(H')|} − p^{2e})` over pairs of copies
/// sharing an edge. Fixing `H` on vertices `0..v`, every overlapping `H'`
/// adds at most `v − 2` new vertices, so its overlap types are enumerated in
/// `K_{2v−2}` and rescaled to `K_n` by falling factorials.
fn exact_moments(pattern: &SubgraphPattern, n: usize, p: f64) -> Option<(f64, f64)> {
    let v = pattern.vertices;
    let e = pattern.edges.len() as i32;
    let host = (2 * v).saturating_sub(2).max(v);
    if falling(host, v) > OVERLAP_MAP_CAP {
        return None;
    }
    let aut = pattern.automorphisms() as f64;
    let copies = falling(n, v) / aut;
    let mut image = vec![0usize; v];
    let mut used = vec![false; host];
    let mut acc = 0.0;
    overlap_sum(pattern, n, p, e, host, 0, &mut image, &mut used, &mut acc);
    Some((copies * p.powi(e), copies * acc / aut))
}

#[allow(clippy::too_many_arguments)]
fn overlap_sum(
    pattern: &SubgraphPattern,
    n: usize,
    p: f64,
    e: i32,
    host: usize,
    pos: usize,
    image: &mut [usize],
    used: &mut [bool],
    acc: &mut f64,
) {
    let v = pattern.vertices;
    if pos == v {
        let shared = pattern
            .edges
            .iter()
            .filter(|&&(a, b)| image[a] < v && image[b] < v && pattern.has_edge(image[a], image[b]))
            .count() as i32;
        if shared == 0 {
            return;
        }
        let fresh = image.iter().filter(|&&h| h >= v).count();
        let scale = falling(n - v, fresh) / falling(host - v, fresh);
        *acc += scale * (p.powi(2 * e - shared) - p.powi(2 * e));
        return;
    }
    for h in 0..host {
        if !used[h] {
            used[h] = true;
            image[pos] = h;
            overlap_sum(pattern, n, p, e, host, pos + 1, image, used, acc);
            used[h] = false;
        }
    }
}

impl SubgraphCount {
    pub fn model(&self) -> &ErdosRenyiModel {
        &self.model
    }

    pub fn pattern(&self) -> &SubgraphPattern {
        &self.pattern
    }

    fn count(&self, adj: &Adjacency) -> f64 {
        self.full.count(adj, &[]) as f64 / self.aut
    }

    /// Copies that contain edge `k` once it is forced present.
    fn copies_through(&self, adj: &mut Adjacency, k: usize) -> f64 {
        let (u, v) = self.model.edge(k);
        let was = adj.force(u, v, true);
        let mut total = 0;
        for emb in &self.through {
            total += emb.count(adj, &[u, v]) + emb.count(adj, &[v, u]);
        }
        adj.force(u, v, was);
        total as f64 / self.aut
    }

    /// Copies containing both edges once both are forced present.
    fn copies_through_both(&self, adj: &mut Adjacency, k: usize, l: usize) -> f64 {
        if k == l {
            return 0.0;
        }
        let (u, v) = self.model.edge(k);
        let (x, y) = self.model.edge(l);
        let was_k = adj.force(u, v, true);
        let was_l = adj.force(x, y, true);
        let mut total = 0;
        for (e, f, emb) in &self.pairs {
            for (hu, hv) in [(u, v), (v, u)] {
                for (hx, hy) in [(x, y), (y, x)] {
                    let mut assign: Vec<(usize, usize)> = vec![(e.0, hu), (e.1, hv), (f.0, hx), (f.1, hy)];
                    assign.sort_unstable();
                    assign.dedup();
                    let mut hosts: Vec<usize> = assign.iter().map(|a| a.1).collect();
                    hosts.sort_unstable();
                    // the assignment must be a partial injective map
                    if assign.windows(2).any(|w| w[0].0 == w[1].0) || hosts.windows(2).any(|w| w[0] == w[1]) {
                        continue;
                    }
                    let fixed: Vec<usize> = emb.order[..assign.len()]
                        .iter()
                        .map(|pv| assign.iter().find(|a| a.0 == *pv).unwrap().1)
                        .collect();
                    total += emb.count(adj, &fixed);
                }
            }
        }
        adj.force(x, y, was_l);
        adj.force(u, v, was_k);
        total as f64 / self.aut
    }
}

impl Functional for SubgraphCount {
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

    fn known_moments(&self) -> Option<(f64, f64)> {
        self.moments
    }
}

impl GradientOracles for SubgraphCount {
    fn gradient(&self, config: &Configuration, k: usize) -> f64 {
        let mut adj = self.model.adjacency(config);
        self.sqrt_pq * self.copies_through(&mut adj, k)
    }

    fn second_gradient(&self, config: &Configuration, k: usize, l: usize) -> f64 {
        let mut adj = self.model.adjacency(config);
        self.pq * self.copies_through_both(&mut adj, k, l)
    }

    fn interactions(&self, k: usize) -> Vec<usize> {
        self.model.edges_where(k, |s| (s == 1 && self.near) || (s == 0 && self.far))
    }

    fn interacts(&self, k: usize, l: usize) -> bool {
        let s = self.model.shared_vertices(k, l);
        k != l && ((s == 1 && self.near) || (s == 0 && self.far))
    }

    fn evaluate_batch(
        &self,
        config: &Configuration,
        firsts: &[usize],
        seconds: &[(usize, usize)],
        first_out: &mut [f64],
        second_out: &mut [f64],
    ) -> f64 {
        let mut adj = self.model.adjacency(config);
        for (o, &k) in first_out.iter_mut().zip(firsts) {
            *o = self.sqrt_pq * self.copies_through(&mut adj, k);
        }
        for (o, &(k, l)) in second_out.iter_mut().zip(seconds) {
            *o = self.pq * self.copies_through_both(&mut adj, k, l);
        }
        self.count(&adj)
    }
}

impl IndexSymmetry for SubgraphCount {
    fn orbits(&self, kind: TupleKind) -> Vec<TupleOrbit> {
        let (near, far) = (self.near, self.far);
        edge_tuple_orbits(self.model.n(), kind, &move |s| (s == 1 && near) || (s == 0 && far))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradient::oracle_deviation;
    use crate::stats::triangles::triangle_statistic;

    #[test]
    fn closed_form_moments_match_enumeration() {
        use crate::exact::Enumeration;
        for n in [4, 5, 6] {
            let model = ErdosRenyiModel::with_p(n, 0.35).unwrap();
            let e = Enumeration::with_default_cap(&model.space()).unwrap();
            for text in ["0-1", "0-1,1-2", "0-1,1-2,2-0", "0-1,1-2,2-3,3-0", "0-1,2-3", "0-1,0-2,0-3"] {
                let pattern = SubgraphPattern::parse(text).unwrap();
                let Ok(s) = subgraph_statistic(&model, &pattern) else { continue };
                let (mean, var) = e.mean_variance(&e.tabulate(&s));
                let (km, kv) = s.known_moments().unwrap();
                assert!((mean - km).abs() < 1e-9 && (var - kv).abs() < 1e-9, "{text} n={n}: {mean} {var} vs {km} {kv}");
            }
        }
        let big = SubgraphPattern::path(8).unwrap();
        let model = ErdosRenyiModel::with_p(10, 0.3).unwrap();
        assert!(subgraph_statistic(&model, &big).unwrap().known_moments().is_none());
    }

    fn all_configs(m: usize) -> Vec<Configuration> {
        (0..1u64 << m).map(|mask| Configuration::from_mask(m, mask)).collect()
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(SubgraphPattern::edge().automorphisms(), 2);
        assert_eq!(SubgraphPattern::triangle().automorphisms(), 6);
        assert_eq!(SubgraphPattern::path(3).unwrap().automorphisms(), 2);
        assert_eq!(SubgraphPattern::cycle(4).unwrap().automorphisms(), 8);
        assert_eq!(SubgraphPattern::parse("0-1, 0-2, 0-3").unwrap().automorphisms(), 6);
    }

    #[test]
    fn hand_counts() {
        let model = ErdosRenyiModel::with_p(3, 0.3).unwrap();
        let s = subgraph_statistic(&model, &SubgraphPattern::path(3).unwrap()).unwrap();
        assert_eq!(s.evaluate(&Configuration::full(3)), 3.0);
        let model = ErdosRenyiModel::with_p(4, 0.3).unwrap();
        let c4 = subgraph_statistic(&model, &SubgraphPattern::cycle(4).unwrap()).unwrap();
        assert_eq!(c4.evaluate(&Configuration::full(6)), 3.0);
        let e = subgraph_statistic(&model, &SubgraphPattern::edge()).unwrap();
        let c = Configuration::from_mask(6, 0b101101);
        assert_eq!(e.evaluate(&c), 4.0);
        for k in 0..6 {
            assert!((e.gradient(&c, k) - (0.21f64).sqrt()).abs() < 1e-12);
        }
        assert!(subgraph_statistic(&model, &SubgraphPattern::cycle(5).unwrap()).is_err());
    }

    #[test]
    fn triangle_pattern_agrees_with_triangle_count() {
        for n in [3, 4, 5] {
            let model = ErdosRenyiModel::with_p(n, 0.4).unwrap();
            let s = subgraph_statistic(&model, &SubgraphPattern::triangle()).unwrap();
            let t = triangle_statistic(&model).unwrap();
            for c in all_configs(model.edge_count()) {
                assert_eq!(s.evaluate(&c), t.evaluate(&c));
            }
        }
    }

    #[test]
    fn oracles_match_pathwise() {
        let model = ErdosRenyiModel::with_p(5, 0.3).unwrap();
        let space = model.space();
        let configs: Vec<_> = all_configs(10).into_iter().step_by(3).collect();
        for pattern in [
            SubgraphPattern::edge(),
            SubgraphPattern::path(3).unwrap(),
            SubgraphPattern::cycle(4).unwrap(),
            SubgraphPattern::triangle(),
            SubgraphPattern::parse("0-1,2-3").unwrap(),
            SubgraphPattern::parse("0-1,1-2,2-3,3-4,1-3").unwrap(),
        ] {
            let s = subgraph_statistic(&model, &pattern).unwrap();
            let dev = oracle_deviation(&space, &s, &configs).unwrap();
            assert!(dev < 1e-12, "{pattern:?}: {dev}");
        }
    }
}
