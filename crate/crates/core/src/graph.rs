//! Plain edge-weighted multigraphs, the input domain of the perfect
//! matching counters. Parallel edges are kept distinct throughout; the
//! pipelines rely on bundles being semantic.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WEdge {
    pub u: usize,
    pub v: usize,
    pub weight: Scalar,
}

/// An edge-weighted multigraph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightedGraph {
    pub n: usize,
    pub edges: Vec<WEdge>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph { n, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, weight: Scalar) -> usize {
        assert!(u < self.n && v < self.n, "endpoint out of range");
        self.edges.push(WEdge { u, v, weight });
        self.edges.len() - 1
    }

    pub fn add_unit_edge(&mut self, u: usize, v: usize) -> usize {
        self.add_edge(u, v, Scalar::one())
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.edges {
            if e.u >= self.n || e.v >= self.n {
                return Err(Error::Malformed("edge endpoint out of range".into()));
            }
        }
        Ok(())
    }

    /// Adjacency lists as (edge id, other endpoint). Self-loops appear twice.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = alloc::vec![Vec::new(); self.n];
        for (eid, e) in self.edges.iter().enumerate() {
            adj[e.u].push((eid, e.v));
            if e.u != e.v {
                adj[e.v].push((eid, e.u));
            } else {
                adj[e.u].push((eid, e.u));
            }
        }
        adj
    }

    /// Connected components as vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = alloc::vec![false; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut stack = alloc::vec![s];
            seen[s] = true;
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &(_, w) in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    /// The complete graph on `n` vertices with unit weights.
    pub fn complete(n: usize) -> Self {
        let mut g = WeightedGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_unit_edge(u, v);
            }
        }
        g
    }

    /// The cycle on `n` vertices with unit weights.
    pub fn cycle(n: usize) -> Self {
        let mut g = WeightedGraph::new(n);
        for u in 0..n {
            g.add_unit_edge(u, (u + 1) % n);
        }
        g
    }

    /// The complete bipartite graph with unit weights; left part first.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut g = WeightedGraph::new(a + b);
        for u in 0..a {
            for v in 0..b {
                g.add_unit_edge(u, a + v);
            }
        }
        g
    }

    /// Biadjacency matrix of a bipartite graph given the left part.
    /// Parallel edge weights are summed.
    pub fn biadjacency(&self, left: &[usize]) -> Result<crate::matrix::Matrix> {
        let is_left = {
            let mut v = alloc::vec![false; self.n];
            for &u in left {
                v[u] = true;
            }
            v
        };
        let right: Vec<usize> = (0..self.n).filter(|&v| !is_left[v]).collect();
        if left.len() != right.len() {
            return Err(Error::Dimension("unbalanced bipartition".into()));
        }
        let mut index = alloc::vec![usize::MAX; self.n];
        for (i, &u) in left.iter().enumerate() {
            index[u] = i;
        }
        for (i, &v) in right.iter().enumerate() {
            index[v] = i;
        }
        let mut m = crate::matrix::Matrix::zeros(left.len(), right.len());
        for e in &self.edges {
            let (lu, lv) = (is_left[e.u], is_left[e.v]);
            if lu == lv {
                return Err(Error::Malformed("edge within one part".into()));
            }
            let (i, j) = if lu { (index[e.u], index[e.v]) } else { (index[e.v], index[e.u]) };
            let cur = m.get(i, j).clone();
            m.set(i, j, &cur + &e.weight);
        }
        Ok(m)
    }
}
