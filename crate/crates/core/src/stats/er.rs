//! The Erdős–Rényi graph `G(n, p)` as a Rademacher space over vertex pairs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::functional::{TupleKind, TupleOrbit};
use crate::space::{Configuration, RademacherSpace};

/// `G(n, p)` with `p = θ n^{-α}`. Edge labels enumerate vertex pairs
/// `{i, j}`, `i < j`, lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct ErdosRenyiModel {
    n: usize,
    alpha: f64,
    theta: f64,
    p: f64,
    endpoints: Vec<(usize, usize)>,
}

impl ErdosRenyiModel {
    pub fn new(n: usize, alpha: f64, theta: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !(theta > 0.0) {
            return Err(Error::OutOfRange(format!("need alpha >= 0 and theta > 0, got {alpha}, {theta}")));
        }
        let p = theta * (n as f64).powf(-alpha);
        Self::build(n, alpha, theta, p)
    }

    /// Fixed edge probability.
    pub fn with_p(n: usize, p: f64) -> Result<Self> {
        Self::build(n, 0.0, p, p)
    }

    fn build(n: usize, alpha: f64, theta: f64, p: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::OutOfRange(format!("graph needs at least 2 vertices, got {n}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::OutOfRange(format!("edge probability {p} is not inside (0, 1)")));
        }
        let mut endpoints = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                endpoints.push((i, j));
            }
        }
        Ok(Self { n, alpha, theta, p, endpoints })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn space(&self) -> RademacherSpace {
        RademacherSpace::homogeneous(self.edge_count(), self.p).expect("p checked at construction")
    }

    /// Label of the pair `{i, j}`.
    pub fn label(&self, i: usize, j: usize) -> Result<usize> {
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::Invalid(format!("({i}, {j}) is not a vertex pair of K_{}", self.n)));
        }
        Ok(pair_label(self.n, i, j))
    }

    pub fn endpoints(&self, k: usize) -> Result<(usize, usize)> {
        self.endpoints
            .get(k)
            .copied()
            .ok_or(Error::IndexOutOfRange { index: k, len: self.edge_count() })
    }

    #[inline]
    pub(crate) fn edge(&self, k: usize) -> (usize, usize) {
        self.endpoints[k]
    }

    /// Number of vertices the edges `k` and `l` have in common.
    #[inline]
    pub fn shared_vertices(&self, k: usize, l: usize) -> usize {
        let (a, b) = self.endpoints[k];
        let (c, d) = self.endpoints[l];
        (a == c || a == d) as usize + (b == c || b == d) as usize
    }

    /// Labels `l ≠ k` of edges sharing at least one vertex with edge `k`.
    pub fn interaction_neighborhood(&self, k: usize) -> Result<Vec<usize>> {
        self.endpoints(k)?;
        Ok(self.edges_where(k, |s| s == 1))
    }

    /// Labels `l ≠ k` whose number of shared vertices with `k` satisfies `rel`.
    pub(crate) fn edges_where(&self, k: usize, rel: impl Fn(usize) -> bool) -> Vec<usize> {
        (0..self.edge_count()).filter(|&l| l != k && rel(self.shared_vertices(k, l))).collect()
    }

    pub fn adjacency(&self, config: &Configuration) -> Adjacency {
        let mut adj = Adjacency::new(self.n);
        adj.load(self, config);
        adj
    }
}

#[inline]
fn pair_label(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Adjacency rows as bitsets.
#[derive(Debug, Clone)]
pub struct Adjacency {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Adjacency {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self { n, words, bits: vec![0; n * words] }
    }

    pub fn load(&mut self, model: &ErdosRenyiModel, config: &Configuration) {
        self.bits.iter_mut().for_each(|w| *w = 0);
        for k in config.ones() {
            let (u, v) = model.edge(k);
            self.insert(u, v);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }

    #[inline]
    pub fn has(&self, u: usize, v: usize) -> bool {
        (self.bits[u * self.words + (v >> 6)] >> (v & 63)) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + (v >> 6)] |= 1 << (v & 63);
        self.bits[v * self.words + (u >> 6)] |= 1 << (u & 63);
    }

    #[inline]
    pub fn remove(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + (v >> 6)] &= !(1 << (v & 63));
        self.bits[v * self.words + (u >> 6)] &= !(1 << (u & 63));
    }

    /// Sets the edge to the given state and returns its previous state.
    #[inline]
    pub fn force(&mut self, u: usize, v: usize, present: bool) -> bool {
        let was = self.has(u, v);
        if present {
            self.insert(u, v);
        } else {
            self.remove(u, v);
        }
        was
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `|N(u) ∩ N(v)|`.
    #[inline]
    pub fn common(&self, u: usize, v: usize) -> usize {
        self.row(u).iter().zip(self.row(v)).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }
}

fn permutations(h: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..h).collect();
    heap_permute(h, &mut perm, &mut out);
    out
}

fn heap_permute(k: usize, perm: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(perm.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, perm, out);
        if k % 2 == 0 {
            perm.swap(i, k - 1);
        } else {
            perm.swap(0, k - 1);
        }
    }
}

fn falling(n: usize, u: usize) -> f64 {
    (0..u).map(|i| (n - i) as f64).product()
}

/// Orbits of edge tuples of `K_n` under vertex permutations.
///
/// `rel(s)` says whether two distinct edges sharing `s` vertices interact.
/// Tuples are enumerated in `K_h` with `h = min(n, 2·arity)`, which contains
/// every tuple shape. A shape using `u` vertices has `n^(u) / h^(u)` times
/// as many copies in `K_n` as in `K_h` (falling factorials).
pub fn edge_tuple_orbits(n: usize, kind: TupleKind, rel: &dyn Fn(usize) -> bool) -> Vec<TupleOrbit> {
    let h = n.min(2 * kind.arity());
    let host = ErdosRenyiModel::with_p(h, 0.5).expect("host graph is valid");
    let m = host.edge_count();
    let interacts = |k: usize, l: usize| k != l && rel(host.shared_vertices(k, l));
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    match kind {
        TupleKind::Single => tuples.extend((0..m).map(|k| vec![k])),
        TupleKind::Pair => {
            for k in 0..m {
                tuples.extend((0..m).filter(|&l| interacts(k, l)).map(|l| vec![k, l]));
            }
        }
        TupleKind::Star => {
            for l in 0..m {
                let nb: Vec<usize> = (0..m).filter(|&j| interacts(l, j)).collect();
                for &j in &nb {
                    tuples.extend(nb.iter().map(|&k| vec![l, j, k]));
                }
            }
        }
    }

    let perms = permutations(h);
    let mut classes: BTreeMap<Vec<(usize, usize)>, usize> = BTreeMap::new();
    for t in &tuples {
        let edges: Vec<(usize, usize)> = t.iter().map(|&k| host.edge(k)).collect();
        let key = perms
            .iter()
            .map(|pi| {
                edges
                    .iter()
                    .map(|&(a, b)| {
                        let (x, y) = (pi[a], pi[b]);
                        if x < y { (x, y) } else { (y, x) }
                    })
                    .collect::<Vec<_>>()
            })
            .min()
            .expect("at least one permutation");
        *classes.entry(key).or_insert(0) += 1;
    }

    classes
        .into_iter()
        .map(|(key, count)| {
            let mut relabel: Vec<Option<usize>> = vec![None; h];
            let mut used = 0;
            for &(a, b) in &key {
                for v in [a, b] {
                    if relabel[v].is_none() {
                        relabel[v] = Some(used);
                        used += 1;
                    }
                }
            }
            let representative = key
                .iter()
                .map(|&(a, b)| pair_label(n, relabel[a].unwrap(), relabel[b].unwrap()))
                .collect();
            TupleOrbit { representative, multiplicity: count as f64 * falling(n, used) / falling(h, used) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexer_round_trip() {
        let g = ErdosRenyiModel::with_p(9, 0.3).unwrap();
        assert_eq!(g.edge_count(), 36);
        for k in 0..g.edge_count() {
            let (i, j) = g.endpoints(k).unwrap();
            assert!(i < j);
            assert_eq!(g.label(i, j).unwrap(), k);
            assert_eq!(g.label(j, i).unwrap(), k);
        }
        assert_eq!(g.label(0, 1).unwrap(), 0);
        assert_eq!(g.label(0, 2).unwrap(), 1);
        assert_eq!(g.label(1, 2).unwrap(), 8);
        assert!(g.label(3, 3).is_err());
        assert!(g.endpoints(36).is_err());
    }

    #[test]
    fn probability_from_alpha_theta() {
        let g = ErdosRenyiModel::new(100, 0.5, 2.0).unwrap();
        assert!((g.p() - 0.2).abs() < 1e-12);
        assert!(ErdosRenyiModel::new(4, 0.0, 1.0).is_err());
        assert!(ErdosRenyiModel::new(4, 0.5, 3.0).is_err());
    }

    #[test]
    fn neighborhood_sizes() {
        let g = ErdosRenyiModel::with_p(4, 0.3).unwrap();
        for k in 0..6 {
            assert_eq!(g.interaction_neighborhood(k).unwrap().len(), 4);
        }
        let g = ErdosRenyiModel::with_p(3, 0.3).unwrap();
        for k in 0..3 {
            assert_eq!(g.interaction_neighborhood(k).unwrap().len(), 2);
        }
        assert!(g.interaction_neighborhood(3).is_err());
    }

    #[test]
    fn adjacency_counts() {
        let g = ErdosRenyiModel::with_p(70, 0.3).unwrap();
        let mut c = Configuration::empty(g.edge_count());
        for (a, b) in [(0, 1), (0, 69), (1, 69), (2, 69)] {
            c.set(g.label(a, b).unwrap(), true);
        }
        let adj = g.adjacency(&c);
        assert_eq!(adj.degree(69), 3);
        assert_eq!(adj.common(0, 1), 1);
        assert!(adj.has(69, 2) && !adj.has(2, 3));
    }

    fn brute_force_total(n: usize, kind: TupleKind, rel: &dyn Fn(usize) -> bool) -> usize {
        let g = ErdosRenyiModel::with_p(n, 0.5).unwrap();
        let m = g.edge_count();
        let nb = |k: usize| g.edges_where(k, |s| rel(s));
        match kind {
            TupleKind::Single => m,
            TupleKind::Pair => (0..m).map(|k| nb(k).len()).sum(),
            TupleKind::Star => (0..m).map(|l| nb(l).len().pow(2)).sum(),
        }
    }

    #[test]
    fn orbit_multiplicities_sum_to_tuple_counts() {
        let one = |s: usize| s == 1;
        let any = |s: usize| s <= 1;
        for n in [3, 4, 5, 7, 12] {
            for kind in [TupleKind::Single, TupleKind::Pair, TupleKind::Star] {
                for rel in [&one as &dyn Fn(usize) -> bool, &any] {
                    let orbits = edge_tuple_orbits(n, kind, rel);
                    let total: f64 = orbits.iter().map(|o| o.multiplicity).sum();
                    assert_eq!(total, brute_force_total(n, kind, rel) as f64, "n={n} {kind:?}");
                    let g = ErdosRenyiModel::with_p(n, 0.5).unwrap();
                    for o in &orbits {
                        assert_eq!(o.representative.len(), kind.arity());
                        assert!(o.representative.iter().all(|&k| k < g.edge_count()));
                        if kind != TupleKind::Single {
                            let r = &o.representative;
                            assert!(rel(g.shared_vertices(r[0], r[1])) && r[0] != r[1]);
                        }
                    }
                }
            }
        }
    }
}
