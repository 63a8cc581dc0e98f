//! The undirected graph of known comparisons.

use std::collections::BTreeSet;

use crate::error::{PcmError, Result};
use crate::linalg::Cholesky;
use crate::matrix::{IncompletePcm, SquareMatrix};

/// Vertices `0..n`; an edge `{i, j}` (stored as `i < j`) for every known comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl ComparisonGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges = edges
            .into_iter()
            .filter(|&(i, j)| i != j && i < n && j < n)
            .map(|(i, j)| (i.min(j), i.max(j)))
            .collect();
        Self { n, edges }
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(i, j)| i == v || j == v)
            .count()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut uf = UnionFind::new(self.n);
        for &(i, j) in &self.edges {
            uf.union(i, j);
        }
        uf.components() == 1
    }

    /// Laplacian with the last row and column removed.
    pub fn reduced_laplacian(&self) -> SquareMatrix {
        let k = self.n - 1;
        let mut l = SquareMatrix::zeros(k);
        for &(i, j) in &self.edges {
            for v in [i, j] {
                if v < k {
                    l.set(v, v, l.get(v, v) + 1.0);
                }
            }
            if i < k && j < k {
                l.set(i, j, -1.0);
                l.set(j, i, -1.0);
            }
        }
        l
    }

    /// Number of spanning trees by the matrix-tree theorem.
    pub fn spanning_tree_count(&self) -> u128 {
        if self.n <= 1 {
            return 1;
        }
        if !self.is_connected() {
            return 0;
        }
        match Cholesky::factor(&self.reduced_laplacian()) {
            Some(c) => c.log_det().exp().round() as u128,
            None => 0,
        }
    }

    /// All spanning trees, each as a list of edges, by recursive
    /// deletion–contraction on the edge list.
    ///
    /// Fails with `TooManyTrees` when the Kirchhoff count exceeds `cap`.
    pub fn spanning_trees(&self, cap: u128) -> Result<Vec<Vec<(usize, usize)>>> {
        if !self.is_connected() {
            return Err(PcmError::DisconnectedGraph);
        }
        let count = self.spanning_tree_count();
        if count > cap {
            return Err(PcmError::TooManyTrees(count));
        }
        let edges: Vec<_> = self.edges.iter().copied().collect();
        let mut out = Vec::with_capacity(count as usize);
        let mut chosen = Vec::with_capacity(self.n.saturating_sub(1));
        enumerate_trees(self.n, &edges, 0, &mut chosen, &mut out);
        Ok(out)
    }
}

fn enumerate_trees(
    n: usize,
    edges: &[(usize, usize)],
    next: usize,
    chosen: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if chosen.len() + 1 == n {
        out.push(chosen.clone());
        return;
    }
    if next == edges.len() {
        return;
    }
    let mut uf = UnionFind::new(n);
    for &(i, j) in chosen.iter() {
        uf.union(i, j);
    }
    let (u, v) = edges[next];
    // contraction: keep the edge if it joins two components
    if uf.find(u) != uf.find(v) {
        chosen.push(edges[next]);
        enumerate_trees(n, edges, next + 1, chosen, out);
        chosen.pop();
    }
    // deletion: drop the edge if the remainder can still span
    for &(i, j) in &edges[next + 1..] {
        uf.union(i, j);
    }
    if uf.components() == 1 {
        enumerate_trees(n, edges, next + 1, chosen, out);
    }
}

#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    components: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            components: n,
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        self.components -= 1;
        true
    }

    pub(crate) fn components(&self) -> usize {
        self.components
    }
}

/// Graph of the known comparisons of `pcm`.
pub fn associated_graph(pcm: &IncompletePcm) -> ComparisonGraph {
    ComparisonGraph::new(pcm.n(), pcm.known_pairs())
}

pub fn is_connected(g: &ComparisonGraph) -> bool {
    g.is_connected()
}

/// Convenience check used by every method that needs a connected graph.
pub(crate) fn require_connected(pcm: &IncompletePcm) -> Result<()> {
    if associated_graph(pcm).is_connected() {
        Ok(())
    } else {
        Err(PcmError::DisconnectedGraph)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_pcm;

    fn example_1() -> IncompletePcm {
        parse_pcm("1,2,*,4\n1/2,1,1,*\n*,1,1,2\n1/4,*,1/2,1").unwrap()
    }

    #[test]
    fn example_1_is_a_four_cycle() {
        let g = associated_graph(&example_1());
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert!(g.is_connected());
        assert!((0..4).all(|v| g.degree(v) == 2));
    }

    #[test]
    fn complete_graph_edges() {
        let g = ComparisonGraph::complete(5);
        assert_eq!(g.edge_count(), 10);
        assert!(g.is_connected());
    }

    #[test]
    fn edge_count_matches_missing_count() {
        let a = example_1();
        let g = associated_graph(&a);
        assert_eq!(g.edge_count(), 4 * 3 / 2 - a.missing_count());
    }

    #[test]
    fn three_vertices_two_missing_is_disconnected() {
        let g = ComparisonGraph::new(3, [(0, 1)]);
        assert!(!g.is_connected());
    }

    #[test]
    fn path_is_connected() {
        let g = ComparisonGraph::new(6, (0..5).map(|i| (i, i + 1)));
        assert!(g.is_connected());
        assert_eq!(g.spanning_tree_count(), 1);
    }

    #[test]
    fn cycle_has_four_spanning_trees() {
        let g = associated_graph(&example_1());
        assert_eq!(g.spanning_tree_count(), 4);
        let trees = g.spanning_trees(100).unwrap();
        assert_eq!(trees.len(), 4);
        for t in &trees {
            assert_eq!(t.len(), 3);
            assert!(ComparisonGraph::new(4, t.iter().copied()).is_connected());
        }
    }

    #[test]
    fn cayley_formula() {
        for n in 2..=7usize {
            let g = ComparisonGraph::complete(n);
            let expected = (n as u128).pow(n as u32 - 2);
            assert_eq!(g.spanning_tree_count(), expected);
            assert_eq!(g.spanning_trees(u128::MAX).unwrap().len() as u128, expected);
        }
    }

    #[test]
    fn tree_cap_is_enforced() {
        let g = ComparisonGraph::complete(5);
        assert_eq!(g.spanning_trees(100), Err(PcmError::TooManyTrees(125)));
    }
}
