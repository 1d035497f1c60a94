//! The key graph `H(n;K)` and its restrictions to deployment phases.
//!
//! Nodes `i` and `j` are adjacent iff their key rings intersect, which
//! happens exactly when `j ∈ Γ_i` or `i ∈ Γ_j`. A [`PhaseView`] keeps only
//! the first `⌊γn⌋` nodes and the edges among them, without copying.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gamma::Gamma;
use crate::model::PairingTable;
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyGraph {
    n: usize,
    /// 0-based `(min, max)` pairs, each undirected edge once.
    edges: Vec<(u32, u32)>,
}

impl KeyGraph {
    pub fn build(table: &PairingTable) -> Self {
        let n = table.n();
        let mut edges = Vec::with_capacity(n * table.k());
        for i in 0..n {
            for &j in table.row(i) {
                // A reciprocal pair was already emitted from the smaller node.
                if (j as usize) < i && table.selects(j as usize, i as u32) {
                    continue;
                }
                let (a, b) = if (i as u32) < j { (i as u32, j) } else { (j, i as u32) };
                edges.push((a, b));
            }
        }
        Self { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as 1-based `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> =
            self.edges.iter().map(|&(a, b)| (a as usize + 1, b as usize + 1)).collect();
        out.sort_unstable();
        out
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n];
        for &(a, b) in &self.edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        deg
    }

    pub fn min_degree(&self) -> u32 {
        self.degrees().into_iter().min().unwrap_or(0)
    }

    pub fn full(&self) -> PhaseView<'_> {
        PhaseView { graph: self, gamma: Gamma::ONE, m: self.n }
    }

    /// The subgraph on nodes `1..=⌊γn⌋`.
    pub fn restrict(&self, gamma: f64) -> Result<PhaseView<'_>> {
        self.restrict_to(Gamma::new(gamma)?)
    }

    pub fn restrict_to(&self, gamma: Gamma) -> Result<PhaseView<'_>> {
        let m = gamma.retained(self.n);
        if m == 0 {
            return Err(Error::EmptyView { gamma: gamma.value(), n: self.n });
        }
        Ok(PhaseView { graph: self, gamma, m })
    }
}

/// `H_γ(n;K)`: the key graph restricted to its first `m = ⌊γn⌋` nodes.
#[derive(Debug, Clone, Copy)]
pub struct PhaseView<'a> {
    graph: &'a KeyGraph,
    gamma: Gamma,
    m: usize,
}

impl<'a> PhaseView<'a> {
    pub fn parent(&self) -> &'a KeyGraph {
        self.graph
    }

    pub fn gamma(&self) -> Gamma {
        self.gamma
    }

    /// Number of retained nodes.
    pub fn m(&self) -> usize {
        self.m
    }

    fn inner_edges(&self) -> impl Iterator<Item = (usize, usize)> + 'a {
        let m = self.m as u32;
        self.graph
            .edges
            .iter()
            .filter(move |&&(_, b)| b < m)
            .map(|&(a, b)| (a as usize, b as usize))
    }

    pub fn edge_count(&self) -> usize {
        self.inner_edges().count()
    }

    /// Edges as 1-based `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.inner_edges().map(|(a, b)| (a + 1, b + 1)).collect();
        out.sort_unstable();
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.m <= 1 {
            return true;
        }
        let mut uf = UnionFind::new(self.m);
        for (a, b) in self.inner_edges() {
            if uf.union(a, b) && uf.components() == 1 {
                return true;
            }
        }
        uf.components() == 1
    }

    pub fn count_isolated(&self) -> usize {
        let mut touched = vec![false; self.m];
        for (a, b) in self.inner_edges() {
            touched[a] = true;
            touched[b] = true;
        }
        touched.iter().filter(|&&t| !t).count()
    }

    /// Adjacency lists of the view, 0-based.
    pub fn neighbors(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.m];
        for (a, b) in self.inner_edges() {
            adj[a].push(b as u32);
            adj[b].push(a as u32);
        }
        adj
    }

    /// Breadth-first connectivity check; slower than [`Self::is_connected`]
    /// and kept as an independent oracle.
    pub fn is_connected_bfs(&self) -> bool {
        if self.m <= 1 {
            return true;
        }
        let adj = self.neighbors();
        let mut seen = vec![false; self.m];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    reached += 1;
                    queue.push_back(v as usize);
                }
            }
        }
        reached == self.m
    }

    /// One `i j` line per edge, 1-based, `i < j`, sorted.
    pub fn edge_list(&self) -> String {
        let mut s = String::new();
        for (a, b) in self.edges() {
            writeln!(s, "{a} {b}").unwrap();
        }
        s
    }
}
