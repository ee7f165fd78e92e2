//! Signature graphs and exact Holant evaluation, the semantic ground truth
//! every pipeline is checked against.

use alloc::vec::Vec;

use crate::embedding::Rotations;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::Scalar;
use crate::signature::Signature;

/// Endpoints of a signature-graph edge. A dangling edge has a single
/// endpoint and serves as an external port.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeEnds {
    Internal(usize, usize),
    Dangling(usize),
}

#[derive(Clone, Debug)]
pub struct SEdge {
    pub ends: EdgeEnds,
    pub weight: Scalar,
}

/// An assignment maps each edge id to a bit; restriction to an ordered edge
/// list is positional.
pub type Assignment = Vec<bool>;

/// An edge-weighted multigraph with a signature at each vertex and an
/// ordered incident-edge list per vertex. A self-loop occupies two
/// positions in its vertex's list but carries a single assignment bit.
#[derive(Clone, Debug)]
pub struct SignatureGraph {
    pub sigs: Vec<Signature>,
    pub edges: Vec<SEdge>,
    pub incidence: Vec<Vec<usize>>,
    /// Planar witness over a subset of vertices (`None` rows are excluded,
    /// e.g. apices). Tracked through constructions, never recomputed.
    pub rotations: Option<Rotations>,
}

impl SignatureGraph {
    pub fn new(
        sigs: Vec<Signature>,
        edges: Vec<SEdge>,
        incidence: Vec<Vec<usize>>,
        rotations: Option<Rotations>,
    ) -> Result<Self> {
        let g = SignatureGraph { sigs, edges, incidence, rotations };
        g.validate()?;
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.sigs.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn dangling_edges(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| matches!(self.edges[e].ends, EdgeEnds::Dangling(_)))
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.dangling_edges().is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.sigs.len();
        if self.incidence.len() != n {
            return Err(Error::Malformed("incidence table size mismatch".into()));
        }
        let mut counts = alloc::vec![0usize; self.edges.len()];
        for (v, list) in self.incidence.iter().enumerate() {
            if self.sigs[v].arity() != list.len() {
                return Err(Error::Arity {
                    expected: self.sigs[v].arity(),
                    got: list.len(),
                });
            }
            for &e in list {
                if e >= self.edges.len() {
                    return Err(Error::Malformed("incidence edge out of range".into()));
                }
                match self.edges[e].ends {
                    EdgeEnds::Internal(a, b) => {
                        if v != a && v != b {
                            return Err(Error::Malformed(alloc::format!(
                                "edge {e} listed at non-endpoint {v}"
                            )));
                        }
                    }
                    EdgeEnds::Dangling(a) => {
                        if v != a {
                            return Err(Error::Malformed(alloc::format!(
                                "dangling edge {e} listed at non-endpoint {v}"
                            )));
                        }
                    }
                }
                counts[e] += 1;
            }
        }
        for (e, c) in counts.iter().enumerate() {
            let want = match self.edges[e].ends {
                EdgeEnds::Internal(..) => 2,
                EdgeEnds::Dangling(_) => 1,
            };
            if *c != want {
                return Err(Error::Malformed(alloc::format!(
                    "edge {e} appears {c} times in incidence lists, expected {want}"
                )));
            }
        }
        Ok(())
    }

    /// Local assignment at `v`: one bit per incidence position.
    pub fn local_bits(&self, v: usize, x: &Assignment) -> Vec<bool> {
        self.incidence[v].iter().map(|&e| x[e]).collect()
    }

    /// Product of vertex-function values at the restrictions, Eq. "Holant
    /// value". Edge weights are not included here.
    pub fn val(&self, x: &Assignment) -> Result<Scalar> {
        if x.len() != self.edges.len() {
            return Err(Error::Malformed("assignment length mismatch".into()));
        }
        let mut acc = Scalar::one();
        for v in 0..self.vertex_count() {
            let local = self.local_bits(v, x);
            let f = self.sigs[v].eval(&local)?;
            if f.is_zero() {
                return Ok(Scalar::zero());
            }
            acc *= &f;
        }
        Ok(acc)
    }

    /// Weight product over active edges, Eq. "Holant weight".
    pub fn weight_product(&self, x: &Assignment) -> Scalar {
        let mut acc = Scalar::one();
        for (e, &b) in x.iter().enumerate() {
            if b {
                acc *= &self.edges[e].weight;
            }
        }
        acc
    }

    /// Converts an all-HW=1 closed signature graph into a plain weighted
    /// graph whose PerfMatch equals the Holant.
    pub fn to_weighted(&self) -> Result<(WeightedGraph, Option<Rotations>)> {
        use crate::signature::Builtin;
        for s in &self.sigs {
            match s {
                Signature::Builtin { kind: Builtin::HwEq1, .. } => {}
                _ => {
                    return Err(Error::Validation(
                        "to_weighted needs HW=1 at every vertex".into(),
                    ))
                }
            }
        }
        let mut g = WeightedGraph::new(self.vertex_count());
        for e in &self.edges {
            match e.ends {
                EdgeEnds::Internal(u, v) => {
                    g.add_edge(u, v, e.weight.clone());
                }
                EdgeEnds::Dangling(_) => {
                    return Err(Error::Validation("to_weighted needs a closed graph".into()))
                }
            }
        }
        Ok((g, self.rotations.clone()))
    }
}

/// Incremental builder; incidence order is call order.
#[derive(Default)]
pub struct SigGraphBuilder {
    sigs: Vec<Signature>,
    edges: Vec<SEdge>,
    incidence: Vec<Vec<usize>>,
}

impl SigGraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, sig: Signature) -> usize {
        self.sigs.push(sig);
        self.incidence.push(Vec::new());
        self.sigs.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize, weight: Scalar) -> usize {
        let e = self.edges.len();
        self.edges.push(SEdge { ends: EdgeEnds::Internal(u, v), weight });
        self.incidence[u].push(e);
        if u != v {
            self.incidence[v].push(e);
        } else {
            self.incidence[u].push(e);
        }
        e
    }

    pub fn add_dangling(&mut self, u: usize) -> usize {
        let e = self.edges.len();
        self.edges.push(SEdge { ends: EdgeEnds::Dangling(u), weight: Scalar::one() });
        self.incidence[u].push(e);
        e
    }

    pub fn finish(self, rotations: Option<Rotations>) -> Result<SignatureGraph> {
        SignatureGraph::new(self.sigs, self.edges, self.incidence, rotations)
    }
}

/// Budgets for the two Holant evaluation strategies.
#[derive(Clone, Copy, Debug)]
pub struct EvalBudget {
    /// Plain enumeration refuses beyond this many edges (2^E loop).
    pub plain_edges: usize,
    /// Pruned search refuses beyond this many visited search nodes.
    pub search_nodes: u64,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget { plain_edges: 28, search_nodes: 200_000_000 }
    }
}

/// Enumerates every assignment with nonzero vertex-value product, in
/// vertex-major order, invoking the sink with the assignment and the full
/// contribution `w(x)·val(x)`.
pub fn for_each_satisfying(
    g: &SignatureGraph,
    budget: &EvalBudget,
    mut sink: impl FnMut(&Assignment, &Scalar),
) -> Result<()> {
    // Edges are assigned at the first vertex (in id order) that contains
    // them; each vertex enumerates only its own support, checking bits
    // fixed by earlier vertices and assigning the fresh ones.
    let n = g.vertex_count();
    let mut owner = alloc::vec![usize::MAX; g.edges.len()];
    for (v, list) in g.incidence.iter().enumerate() {
        for &e in list {
            if owner[e] == usize::MAX {
                owner[e] = v;
            }
        }
    }
    // Classify each incidence position: fixed by an earlier vertex,
    // assigned at its first occurrence here, or a repeat of a self-loop
    // bit assigned here.
    #[derive(Clone, Copy, PartialEq)]
    enum Pos {
        Fixed,
        AssignFirst,
        Repeat,
    }
    let mut pos_kind: Vec<Vec<Pos>> = Vec::with_capacity(n);
    for (v, list) in g.incidence.iter().enumerate() {
        let mut first_here: alloc::collections::BTreeSet<usize> = Default::default();
        let mut flags = Vec::with_capacity(list.len());
        for &e in list {
            if owner[e] != v {
                flags.push(Pos::Fixed);
            } else if first_here.insert(e) {
                flags.push(Pos::AssignFirst);
            } else {
                flags.push(Pos::Repeat);
            }
        }
        pos_kind.push(flags);
    }
    let supports: Vec<Vec<(Vec<bool>, Scalar)>> =
        g.sigs.iter().map(Signature::support).collect();

    let mut x: Assignment = alloc::vec![false; g.edges.len()];
    let mut nodes: u64 = 0;

    // Explicit stack recursion over vertices.
    fn rec(
        g: &SignatureGraph,
        budget: &EvalBudget,
        pos_kind: &[Vec<Pos>],
        supports: &[Vec<(Vec<bool>, Scalar)>],
        v: usize,
        x: &mut Assignment,
        acc: &Scalar,
        nodes: &mut u64,
        sink: &mut impl FnMut(&Assignment, &Scalar),
    ) -> Result<()> {
        if v == g.vertex_count() {
            sink(x, acc);
            return Ok(());
        }
        let list = &g.incidence[v];
        'elem: for (bits, value) in &supports[v] {
            *nodes += 1;
            if *nodes > budget.search_nodes {
                return Err(Error::Budget(alloc::format!(
                    "holant search exceeded {} nodes",
                    budget.search_nodes
                )));
            }
            // Bits fixed by earlier vertices must agree.
            for (pos, &e) in list.iter().enumerate() {
                if pos_kind[v][pos] == Pos::Fixed && x[e] != bits[pos] {
                    continue 'elem;
                }
            }
            // Self-loop positions must agree with their first occurrence.
            for (pos, &e) in list.iter().enumerate() {
                if pos_kind[v][pos] == Pos::Repeat {
                    let first = list
                        .iter()
                        .position(|&e2| e2 == e)
                        .expect("repeat has a first occurrence");
                    if bits[first] != bits[pos] {
                        continue 'elem;
                    }
                }
            }
            let mut weight = Scalar::one();
            for (pos, &e) in list.iter().enumerate() {
                if pos_kind[v][pos] == Pos::AssignFirst {
                    x[e] = bits[pos];
                    if bits[pos] {
                        weight *= &g.edges[e].weight;
                    }
                }
            }
            let next = &(acc * value) * &weight;
            if !next.is_zero() {
                rec(g, budget, pos_kind, supports, v + 1, x, &next, nodes, sink)?;
            }
            for (pos, &e) in list.iter().enumerate() {
                if pos_kind[v][pos] == Pos::AssignFirst {
                    x[e] = false;
                }
            }
        }
        Ok(())
    }

    rec(g, budget, &pos_kind, &supports, 0, &mut x, &Scalar::one(), &mut nodes, &mut sink)
}

/// Holant by the support-pruned vertex-major search.
pub fn holant(g: &SignatureGraph) -> Result<Scalar> {
    holant_with(g, &EvalBudget::default())
}

pub fn holant_with(g: &SignatureGraph, budget: &EvalBudget) -> Result<Scalar> {
    if !g.is_closed() {
        return Err(Error::Validation("holant needs a closed signature graph".into()));
    }
    let mut acc = Scalar::zero();
    for_each_satisfying(g, budget, |_, value| acc += value)?;
    Ok(acc)
}

/// Holant by the plain 2^{|E|} loop. Refuses (never truncates) beyond the
/// edge budget.
pub fn holant_plain(g: &SignatureGraph, budget: &EvalBudget) -> Result<Scalar> {
    if !g.is_closed() {
        return Err(Error::Validation("holant needs a closed signature graph".into()));
    }
    let m = g.edges.len();
    if m > budget.plain_edges {
        return Err(Error::Budget(alloc::format!(
            "{m} edges exceeds plain enumeration budget {}",
            budget.plain_edges
        )));
    }
    let mut acc = Scalar::zero();
    for mask in 0u64..(1 << m) {
        let x: Assignment = (0..m).map(|e| (mask >> e) & 1 == 1).collect();
        let v = g.val(&x)?;
        if v.is_zero() {
            continue;
        }
        acc += &(&g.weight_product(&x) * &v);
    }
    Ok(acc)
}

/// Attaches HW=1 to every vertex of a weighted graph; the Holant of the
/// result is exactly PerfMatch.
pub fn perfmatch_signature_graph(g: &WeightedGraph) -> SignatureGraph {
    let mut b = SigGraphBuilder::new();
    for _ in 0..g.n {
        b.add_vertex(Signature::hw1(0));
    }
    for e in &g.edges {
        b.add_edge(e.u, e.v, e.weight.clone());
    }
    // Fix arities to the actual degrees.
    let mut sg = SignatureGraph {
        sigs: b.sigs,
        edges: b.edges,
        incidence: b.incidence,
        rotations: None,
    };
    for v in 0..sg.sigs.len() {
        sg.sigs[v] = Signature::hw1(sg.incidence[v].len());
    }
    sg.validate().expect("construction is consistent");
    sg
}

/// Evaluates PerfMatch through the Holant formulation.
pub fn perfmatch_via_holant(g: &WeightedGraph, budget: &EvalBudget) -> Result<Scalar> {
    holant_with(&perfmatch_signature_graph(g), budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Builtin;

    fn hw1_graph(edges: &[(usize, usize, i64)], n: usize) -> SignatureGraph {
        let mut g = WeightedGraph::new(n);
        for &(u, v, w) in edges {
            g.add_edge(u, v, Scalar::from_int(w));
        }
        perfmatch_signature_graph(&g)
    }

    #[test]
    fn triangle_all_hw1_is_zero() {
        let g = hw1_graph(&[(0, 1, 1), (1, 2, 1), (2, 0, 1)], 3);
        assert_eq!(holant(&g).unwrap(), Scalar::zero());
        assert_eq!(holant_plain(&g, &EvalBudget::default()).unwrap(), Scalar::zero());
    }

    #[test]
    fn four_cycle_two_matchings() {
        let g = hw1_graph(&[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)], 4);
        assert_eq!(holant(&g).unwrap(), Scalar::from_int(2));
    }

    #[test]
    fn single_weighted_edge() {
        let g = hw1_graph(&[(0, 1, 5)], 2);
        assert_eq!(holant(&g).unwrap(), Scalar::from_int(5));
    }

    #[test]
    fn empty_assignment_on_hw0() {
        let mut b = SigGraphBuilder::new();
        let u = b.add_vertex(Signature::builtin(Builtin::HwEq0, 1).unwrap());
        let v = b.add_vertex(Signature::builtin(Builtin::HwEq0, 1).unwrap());
        b.add_edge(u, v, Scalar::one());
        let g = b.finish(None).unwrap();
        let x = alloc::vec![false];
        assert_eq!(g.val(&x).unwrap(), Scalar::one());
        assert_eq!(holant(&g).unwrap(), Scalar::one());
    }

    #[test]
    fn val_triangle_one_active_edge() {
        let g = hw1_graph(&[(0, 1, 1), (1, 2, 1), (2, 0, 1)], 3);
        // One active edge leaves the third vertex unmatched.
        let x = alloc::vec![true, false, false];
        assert_eq!(g.val(&x).unwrap(), Scalar::zero());
    }

    #[test]
    fn strategies_agree_on_pass_star() {
        // A PASS vertex with four pendant HW=1 paths.
        let mut b = SigGraphBuilder::new();
        let center = b.add_vertex(Signature::pass());
        for _ in 0..4 {
            let leaf = b.add_vertex(Signature::hw1(1));
            b.add_edge(center, leaf, Scalar::one());
        }
        let g = b.finish(None).unwrap();
        let h1 = holant(&g).unwrap();
        let h2 = holant_plain(&g, &EvalBudget::default()).unwrap();
        assert_eq!(h1, h2);
        // All four pendant edges are forced active: PASS(1111) = -1.
        assert_eq!(h1, -Scalar::one());
    }

    #[test]
    fn perfmatch_formulations_agree() {
        assert_eq!(
            perfmatch_via_holant(&WeightedGraph::complete(4), &EvalBudget::default()).unwrap(),
            Scalar::from_int(3)
        );
        assert_eq!(
            perfmatch_via_holant(&WeightedGraph::cycle(6), &EvalBudget::default()).unwrap(),
            Scalar::from_int(2)
        );
        assert_eq!(
            perfmatch_via_holant(
                &WeightedGraph::complete_bipartite(3, 3),
                &EvalBudget::default()
            )
            .unwrap(),
            Scalar::from_int(6)
        );
    }

    #[test]
    fn self_loop_single_bit() {
        // A self-loop occupies two incidence positions but one bit. With
        // HW=1 of arity 3 at the vertex plus one pendant edge, activating
        // the loop makes the local weight 2, so only the pendant matching
        // survives.
        let mut b = SigGraphBuilder::new();
        let v = b.add_vertex(Signature::hw1(3));
        let leaf = b.add_vertex(Signature::hw1(1));
        b.add_edge(v, v, Scalar::from_int(7));
        b.add_edge(v, leaf, Scalar::from_int(2));
        let g = b.finish(None).unwrap();
        assert_eq!(holant(&g).unwrap(), Scalar::from_int(2));
    }

    #[test]
    fn budget_refusal_is_explicit() {
        let g = hw1_graph(&[(0, 1, 1)], 2);
        let tiny = EvalBudget { plain_edges: 0, search_nodes: 1 };
        assert!(matches!(holant_plain(&g, &tiny), Err(Error::Budget(_))));
        assert!(matches!(holant_with(&g, &tiny), Err(Error::Budget(_))));
    }
}
