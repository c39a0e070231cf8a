//! Bond percolation on a finite rooted tree and its component count.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::functional::{Functional, GradientOracles, IndexSymmetry, TupleKind, TupleOrbit};
use crate::space::{Configuration, RademacherSpace};

/// A rooted tree with vertices numbered in breadth-first order (root 0,
/// children in their given order). Edge `k` joins vertex `k + 1` to its
/// parent.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

impl TreeModel {
    /// Builds from child lists indexed by arbitrary vertex ids, relabelling
    /// in breadth-first order from `root`.
    fn from_children(children_of: &[Vec<usize>], root: usize) -> Self {
        let mut new_id = vec![usize::MAX; children_of.len()];
        let mut order = Vec::with_capacity(children_of.len());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            new_id[v] = order.len();
            order.push(v);
            queue.extend(children_of[v].iter().copied());
        }
        let n = order.len();
        let mut parent = vec![0; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            for &c in &children_of[v] {
                let ci = new_id[c];
                parent[ci] = i;
                depth[ci] = depth[i] + 1;
                children[i].push(ci);
            }
        }
        Self { parent, children, depth }
    }

    /// The tree truncated at `depth` in which every vertex above the last
    /// layer has `d` children.
    pub fn regular(d: usize, depth: usize) -> Result<Self> {
        if d == 0 || depth == 0 {
            return Err(Error::OutOfRange(format!("need D >= 1 and depth >= 1, got {d}, {depth}")));
        }
        let mut size: usize = 1;
        let mut layer: usize = 1;
        for _ in 0..depth {
            layer = layer.checked_mul(d).ok_or_else(|| Error::OutOfRange("tree too large".into()))?;
            size += layer;
        }
        if size > 1 << 24 {
            return Err(Error::OutOfRange(format!("tree with {size} vertices is too large")));
        }
        let mut children = vec![Vec::new(); size];
        let mut next = 1;
        for v in 0..size {
            if next >= size {
                break;
            }
            children[v] = (next..next + d).collect();
            next += d;
        }
        Ok(Self::from_children(&children, 0))
    }

    /// Parses `parent child` lines (vertex ids from 1, the root is vertex 1).
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse { line: i + 1, message: format!("`{s}`: {e}") })
            };
            if nums.len() != 2 {
                return Err(Error::Parse { line: i + 1, message: "expected `parent child`".into() });
            }
            let (p, c) = (parse(nums[0])?, parse(nums[1])?);
            if p == 0 || c == 0 {
                return Err(Error::Parse { line: i + 1, message: "vertex ids start at 1".into() });
            }
            pairs.push((p - 1, c - 1, i + 1));
        }
        if pairs.is_empty() {
            return Err(Error::Empty("tree file has no edges".into()));
        }
        let n = pairs.iter().map(|&(p, c, _)| p.max(c) + 1).max().unwrap();
        let mut children = vec![Vec::new(); n];
        let mut has_parent = vec![false; n];
        for &(p, c, line) in &pairs {
            if c == 0 || has_parent[c] {
                return Err(Error::Parse { line, message: format!("vertex {} has two parents or is the root", c + 1) });
            }
            has_parent[c] = true;
            children[p].push(c);
        }
        let tree = Self::from_children(&children, 0);
        if tree.parent.len() != pairs.len() + 1 {
            return Err(Error::Invalid("edges do not form a tree rooted at vertex 1".into()));
        }
        Ok(tree)
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    /// `|𝒯_n|`, the number of edges.
    pub fn edge_count(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// `(parent, child)` of edge `k`.
    pub fn edge(&self, k: usize) -> (usize, usize) {
        (self.parent[k + 1], k + 1)
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn vertex_depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Edges at vertex `v`.
    pub fn incident(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let up = (v != 0).then(|| v - 1);
        up.into_iter().chain(self.children[v].iter().map(|c| c - 1))
    }

    pub fn space(&self, p: f64) -> Result<RademacherSpace> {
        RademacherSpace::homogeneous(self.edge_count(), p)
    }

    /// Edges `l ≠ k` sharing a vertex with edge `k`.
    pub fn interaction_neighborhood(&self, k: usize) -> Result<Vec<usize>> {
        if k >= self.edge_count() {
            return Err(Error::IndexOutOfRange { index: k, len: self.edge_count() });
        }
        Ok(self.neighbours(k))
    }

    fn neighbours(&self, k: usize) -> Vec<usize> {
        let (u, v) = self.edge(k);
        let mut out: Vec<usize> = self.incident(u).chain(self.incident(v)).filter(|&l| l != k).collect();
        out.sort_unstable();
        out
    }

    fn shared_vertex(&self, k: usize, l: usize) -> Option<usize> {
        if k == l {
            return None;
        }
        let (a, b) = self.edge(k);
        let (c, d) = self.edge(l);
        [a, b].into_iter().find(|&x| x == c || x == d)
    }

    /// All vertices of a layer have the same number of children.
    pub fn is_spherically_symmetric(&self) -> bool {
        let mut per_layer: BTreeMap<usize, usize> = BTreeMap::new();
        (0..self.vertex_count()).all(|v| {
            let c = self.children[v].len();
            *per_layer.entry(self.depth[v]).or_insert(c) == c
        })
    }

    fn lca_depth(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a];
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b];
        }
        while a != b {
            a = self.parent[a];
            b = self.parent[b];
        }
        self.depth[a]
    }
}

/// Disjoint sets with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// `C`, the number of connected components of the retained edges that
/// contain at least one edge.
#[derive(Debug, Clone)]
pub struct ComponentCount {
    tree: TreeModel,
    p: f64,
    sqrt_pq: f64,
    pq: f64,
    symmetric: bool,
}

pub fn percolation_statistic(tree: &TreeModel, p: f64) -> Result<ComponentCount> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange(format!("retention probability {p} is not inside (0, 1)")));
    }
    if tree.edge_count() == 0 {
        return Err(Error::OutOfRange("tree needs depth at least 1".into()));
    }
    let pq = p * (1.0 - p);
    Ok(ComponentCount {
        tree: tree.clone(),
        p,
        sqrt_pq: pq.sqrt(),
        pq,
        symmetric: tree.is_spherically_symmetric(),
    })
}

impl ComponentCount {
    pub fn tree(&self) -> &TreeModel {
        &self.tree
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn space(&self) -> RademacherSpace {
        self.tree.space(self.p).expect("p checked at construction")
    }

    /// Whether `v` has a retained edge other than those in `skip`.
    fn touched_except(&self, config: &Configuration, v: usize, skip: &[usize]) -> bool {
        self.tree.incident(v).any(|e| !skip.contains(&e) && config.get(e))
    }
}

impl Functional for ComponentCount {
    fn index_count(&self) -> usize {
        self.tree.edge_count()
    }

    fn evaluate(&self, config: &Configuration) -> f64 {
        let mut uf = UnionFind::new(self.tree.vertex_count());
        let mut touched = vec![false; self.tree.vertex_count()];
        for k in config.ones() {
            let (u, v) = self.tree.edge(k);
            uf.union(u, v);
            touched[u] = true;
            touched[v] = true;
        }
        (0..touched.len()).filter(|&v| touched[v] && uf.find(v) == v).count() as f64
    }

    fn oracles(&self) -> Option<&dyn GradientOracles> {
        Some(self)
    }

    fn symmetry(&self) -> Option<&dyn IndexSymmetry> {
        self.symmetric.then_some(self as &dyn IndexSymmetry)
    }

    /// On a forest, `C` is the number of touched vertices minus the number of
    /// retained edges, which gives the moments in closed form.
    fn known_moments(&self) -> Option<(f64, f64)> {
        let t = &self.tree;
        let (p, q) = (self.p, 1.0 - self.p);
        let deg = |v: usize| t.incident(v).count() as i32;
        let m = t.edge_count() as f64;
        let mut mean = -m * p;
        let mut var = m * p * q;
        for v in 0..t.vertex_count() {
            let qa = q.powi(deg(v));
            mean += 1.0 - qa;
            var += qa * (1.0 - qa);
            // covariance of the touched indicator with each incident edge
            var -= 2.0 * deg(v) as f64 * p * qa;
        }
        for k in 0..t.edge_count() {
            let (u, v) = t.edge(k);
            let (a, b) = (deg(u), deg(v));
            var += 2.0 * (q.powi(a + b - 1) - q.powi(a + b));
        }
        Some((mean, var))
    }
}

impl GradientOracles for ComponentCount {
    fn gradient(&self, config: &Configuration, k: usize) -> f64 {
        let (u, v) = self.tree.edge(k);
        let raw = 1.0
            - self.touched_except(config, u, &[k]) as u8 as f64
            - self.touched_except(config, v, &[k]) as u8 as f64;
        self.sqrt_pq * raw
    }

    fn second_gradient(&self, config: &Configuration, k: usize, l: usize) -> f64 {
        match self.tree.shared_vertex(k, l) {
            Some(s) if !self.touched_except(config, s, &[k, l]) => -self.pq,
            _ => 0.0,
        }
    }

    fn interactions(&self, k: usize) -> Vec<usize> {
        self.tree.neighbours(k)
    }

    fn interacts(&self, k: usize, l: usize) -> bool {
        self.tree.shared_vertex(k, l).is_some()
    }
}

impl IndexSymmetry for ComponentCount {
    /// Rooted automorphisms of a spherically symmetric tree act transitively
    /// on vertex tuples with equal depths and equal pairwise meeting depths.
    fn orbits(&self, kind: TupleKind) -> Vec<TupleOrbit> {
        let t = &self.tree;
        let m = t.edge_count();
        let mut classes: BTreeMap<Vec<usize>, (Vec<usize>, usize)> = BTreeMap::new();
        let mut add = |tuple: Vec<usize>| {
            let tips: Vec<usize> = tuple.iter().map(|&k| k + 1).collect();
            let mut key: Vec<usize> = tips.iter().map(|&v| t.depth[v]).collect();
            for i in 0..tips.len() {
                for j in i + 1..tips.len() {
                    key.push(t.lca_depth(tips[i], tips[j]));
                }
            }
            classes.entry(key).or_insert_with(|| (tuple, 0)).1 += 1;
        };
        match kind {
            TupleKind::Single => (0..m).for_each(|k| add(vec![k])),
            TupleKind::Pair => {
                for k in 0..m {
                    for l in t.neighbours(k) {
                        add(vec![k, l]);
                    }
                }
            }
            TupleKind::Star => {
                for l in 0..m {
                    let nb = t.neighbours(l);
                    for &j in &nb {
                        for &k in &nb {
                            add(vec![l, j, k]);
                        }
                    }
                }
            }
        }
        classes
            .into_values()
            .map(|(representative, count)| TupleOrbit { representative, multiplicity: count as f64 })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Enumeration;
    use crate::gradient::{gradient, gradient_table, oracle_deviation, second_gradient};

    fn all_configs(m: usize) -> Vec<Configuration> {
        (0..1u64 << m).map(|mask| Configuration::from_mask(m, mask)).collect()
    }

    #[test]
    fn regular_tree_shape() {
        let t = TreeModel::regular(2, 3).unwrap();
        assert_eq!(t.edge_count(), 14);
        assert_eq!(t.depth(), 3);
        assert_eq!(t.edge(0), (0, 1));
        assert_eq!(t.edge(2), (1, 3));
        assert_eq!(t.vertex_depth(14), 3);
        assert!(t.is_spherically_symmetric());
        assert_eq!(TreeModel::regular(1, 6).unwrap().edge_count(), 6);
        assert_eq!(TreeModel::regular(2, 10).unwrap().edge_count(), 2046);
    }

    #[test]
    fn parse_relabels_breadth_first() {
        let t = TreeModel::parse("# comment\n1 2\n2 4\n1 3\n\n2 5\n").unwrap();
        assert_eq!(t.edge_count(), 4);
        assert_eq!(t.children(0), &[1, 2]);
        assert_eq!(t.edge(3), (1, 4));
        assert!(!t.is_spherically_symmetric());
        assert!(TreeModel::parse("1 2\n3 2\n").is_err());
        assert!(TreeModel::parse("1 2\n3 4\n").is_err());
        assert!(matches!(TreeModel::parse("1 x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(TreeModel::parse("").is_err());
    }

    #[test]
    fn component_count_examples() {
        let path = TreeModel::regular(1, 6).unwrap();
        let c = percolation_statistic(&path, 0.5).unwrap();
        assert_eq!(c.evaluate(&Configuration::full(6)), 1.0);
        assert_eq!(c.evaluate(&Configuration::empty(6)), 0.0);
        assert_eq!(c.evaluate(&Configuration::from_bits(&[true, false, true, false, true, false])), 3.0);
        assert_eq!(path.interaction_neighborhood(2).unwrap(), vec![1, 3]);
        assert!(path.interaction_neighborhood(6).is_err());
    }

    #[test]
    fn oracles_match_pathwise_and_are_bounded() {
        let t = TreeModel::parse("1 2\n1 3\n1 4\n2 5\n2 6\n4 7\n7 8\n7 9\n3 10\n").unwrap();
        let c = percolation_statistic(&t, 0.35).unwrap();
        let space = c.space();
        let configs = all_configs(t.edge_count());
        assert!(oracle_deviation(&space, &c, &configs).unwrap() < 1e-12);
        let s = space.sqrt_pq(0);
        for cfg in configs.iter().step_by(5) {
            for k in 0..t.edge_count() {
                assert!(gradient(&space, &c, k).unwrap().evaluate(cfg).abs() <= s + 1e-12);
                for l in 0..t.edge_count() {
                    let v = second_gradient(&space, &c, k, l).unwrap().evaluate(cfg);
                    assert!(v.abs() <= 2.0 * s * s + 1e-12);
                }
            }
        }
    }

    #[test]
    fn known_moments_match_enumeration() {
        for t in [
            TreeModel::regular(2, 3).unwrap(),
            TreeModel::parse("1 2\n1 3\n1 4\n2 5\n4 6\n6 7\n").unwrap(),
        ] {
            let c = percolation_statistic(&t, 0.3).unwrap();
            let e = Enumeration::with_default_cap(&c.space()).unwrap();
            let (mean, var) = e.mean_variance(&e.tabulate(&c));
            let (km, kv) = c.known_moments().unwrap();
            assert!((mean - km).abs() < 1e-10 && (var - kv).abs() < 1e-10, "{mean} {km} {var} {kv}");
        }
    }

    #[test]
    fn orbit_members_share_expectations() {
        let t = TreeModel::regular(2, 3).unwrap();
        let c = percolation_statistic(&t, 0.4).unwrap();
        let space = c.space();
        let e = Enumeration::with_default_cap(&space).unwrap();
        let table = e.tabulate(&c);
        let grads: Vec<Vec<f64>> = (0..14).map(|k| gradient_table(&space, &table, k)).collect();
        let m = |k: usize, l: usize| e.expect(|w| (grads[k][w] * grads[l][w]).powi(2));
        let orbits = c.orbits(TupleKind::Pair);
        let total: f64 = orbits.iter().map(|o| o.multiplicity).sum();
        let pairs: usize = (0..14).map(|k| t.neighbours(k).len()).sum();
        assert_eq!(total, pairs as f64);
        // every member of an orbit matches its representative
        for k in 0..14 {
            for l in t.neighbours(k) {
                let tips = [k + 1, l + 1];
                let key = vec![t.depth[tips[0]], t.depth[tips[1]], t.lca_depth(tips[0], tips[1])];
                let rep = orbits
                    .iter()
                    .map(|o| &o.representative)
                    .find(|r| {
                        let rt = [r[0] + 1, r[1] + 1];
                        vec![t.depth[rt[0]], t.depth[rt[1]], t.lca_depth(rt[0], rt[1])] == key
                    })
                    .unwrap();
                assert!((m(k, l) - m(rep[0], rep[1])).abs() < 1e-12);
            }
        }
        let stars: f64 = c.orbits(TupleKind::Star).iter().map(|o| o.multiplicity).sum();
        assert_eq!(stars, (0..14).map(|l| t.neighbours(l).len().pow(2)).sum::<usize>() as f64);
    }
}
