//! Gates: signature graphs with labeled dangling edges, their extracted
//! signatures, Holant-preserving insertion, and the linear-combination
//! expansion engine.

use alloc::vec::Vec;

use crate::bits::index_of;
use crate::embedding::{self, Dart, Rotations};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::Scalar;
use crate::sig_graph::{
    for_each_satisfying, EdgeEnds, EvalBudget, SEdge, SignatureGraph,
};
use crate::signature::Signature;

/// A gate: a signature graph with an ordered list of dangling edges
/// (labels 1..d are positions in `dangling`). Dangling edges always have
/// weight one.
#[derive(Clone, Debug)]
pub struct Gate {
    pub graph: SignatureGraph,
    pub dangling: Vec<usize>,
}

impl Gate {
    pub fn new(graph: SignatureGraph, dangling: Vec<usize>) -> Result<Self> {
        let mut seen = alloc::vec![false; graph.edges.len()];
        for &e in &dangling {
            if e >= graph.edges.len() {
                return Err(Error::Malformed("dangling label out of range".into()));
            }
            if !matches!(graph.edges[e].ends, EdgeEnds::Dangling(_)) {
                return Err(Error::Malformed("label does not name a dangling edge".into()));
            }
            if !graph.edges[e].weight.is_one() {
                return Err(Error::Malformed("dangling edges must have weight 1".into()));
            }
            if seen[e] {
                return Err(Error::Malformed("duplicate dangling label".into()));
            }
            seen[e] = true;
        }
        if dangling.len() != graph.dangling_edges().len() {
            return Err(Error::Malformed("dangling list must cover all dangling edges".into()));
        }
        Ok(Gate { graph, dangling })
    }

    pub fn arity(&self) -> usize {
        self.dangling.len()
    }

    /// Validates the planar witness, if one is attached.
    pub fn check_witness(&self) -> Result<()> {
        match embedded_view_of(&self.graph)? {
            None => Ok(()),
            Some((g, rot)) => {
                embedding::validate_rotations(&g, &rot)?;
                embedding::euler_check(&g, &rot)
            }
        }
    }
}

/// Embedded view of a signature graph: excluded vertices dropped, dangling
/// edges materialized as edges to phantom leaves. A dangling edge may be
/// omitted from its vertex's rotation (apex ports); internal edges between
/// embedded vertices must appear.
pub fn embedded_view_of(sg: &SignatureGraph) -> Result<Option<(WeightedGraph, Rotations)>> {
    let Some(rot) = sg.rotations.as_ref() else {
        return Ok(None);
    };
    if rot.0.len() != sg.vertex_count() {
        return Err(Error::Malformed("rotation table size mismatch".into()));
    }
    let n = sg.vertex_count();
    let mut g = WeightedGraph::new(n);
    let mut lists: Vec<Option<Vec<Dart>>> = rot.0.clone();
    let embedded = |v: usize| rot.is_embedded(v);
    // Which darts actually occur in the rotation lists.
    let mut present = alloc::vec![false; sg.edges.len()];
    for list in rot.0.iter().flatten() {
        for &(eid, _) in list {
            if eid >= sg.edges.len() {
                return Err(Error::Malformed("rotation dart out of range".into()));
            }
            present[eid] = true;
        }
    }
    let mut edge_map = alloc::vec![usize::MAX; sg.edges.len()];
    for (eid, e) in sg.edges.iter().enumerate() {
        match e.ends {
            EdgeEnds::Internal(u, v) => {
                if embedded(u) && embedded(v) {
                    if !present[eid] {
                        return Err(Error::Malformed(alloc::format!(
                            "internal edge {eid} missing from rotations"
                        )));
                    }
                    edge_map[eid] = g.add_edge(u, v, e.weight.clone());
                } else if present[eid] {
                    return Err(Error::Malformed(alloc::format!(
                        "edge {eid} touches an excluded vertex but appears in rotations"
                    )));
                }
            }
            EdgeEnds::Dangling(u) => {
                // Present danglings get phantom leaves; absent ones are
                // excluded ports (apex wiring).
                if embedded(u) && present[eid] {
                    let phantom = g.n;
                    g.n += 1;
                    lists.push(Some(Vec::new()));
                    edge_map[eid] = g.add_edge(u, phantom, e.weight.clone());
                    lists[phantom] = Some(alloc::vec![(edge_map[eid], 1)]);
                }
            }
        }
    }
    // Remap darts in the original rotation lists.
    for lst in lists.iter_mut().take(n) {
        if let Some(list) = lst {
            *list = list.iter().map(|&(eid, end)| (edge_map[eid], end)).collect();
        }
    }
    Ok(Some((g, Rotations(lists))))
}

/// The signature of a gate: for each dangling assignment, the Holant-style
/// sum over internal assignments. Returned as a dense table.
pub fn gate_signature(gate: &Gate, budget: &EvalBudget) -> Result<Signature> {
    let d = gate.arity();
    let mut table = alloc::vec![Scalar::zero(); 1usize << d];
    for_each_satisfying(&gate.graph, budget, |x, value| {
        let bits: Vec<bool> = gate.dangling.iter().map(|&e| x[e]).collect();
        // Dangling edges have weight 1, so `value` already equals
        // w(internal actives) * val.
        table[index_of(&bits)] += value;
    })?;
    Signature::dense(d, table)
}

/// Result of inserting a gate: the new graph plus vertex maps for both the
/// host (the deleted vertex maps to usize::MAX) and the gate.
#[derive(Clone, Debug)]
pub struct Inserted {
    pub graph: SignatureGraph,
    pub host_vertex_map: Vec<usize>,
    pub gate_vertex_map: Vec<usize>,
}

/// Replaces vertex `v` of `host` by a copy of `gate`, identifying the i-th
/// incident edge of `v` with the i-labeled dangling edge. Host edge weights
/// survive (gate dangling edges are weight 1 by invariant). The Holant is
/// preserved whenever `Sig(gate)` equals the signature at `v`.
///
/// Planar witnesses are carried mechanically: if both sides have one, the
/// merged rotation system replaces `v`'s darts by the gate's attachment
/// darts in place. The merge is validated by the caller where planarity
/// matters (the result may legitimately be non-planar).
pub fn insert_gate(host: &SignatureGraph, v: usize, gate: &Gate) -> Result<Inserted> {
    let d = host.incidence[v].len();
    if d != gate.arity() {
        return Err(Error::Arity { expected: d, got: gate.arity() });
    }
    let hn = host.vertex_count();
    // Host vertices keep ids except v; gate vertices follow.
    let mut host_map = alloc::vec![usize::MAX; hn];
    let mut next = 0usize;
    for u in 0..hn {
        if u != v {
            host_map[u] = next;
            next += 1;
        }
    }
    let gate_base = next;
    let gn = gate.graph.vertex_count();
    let gate_map: Vec<usize> = (0..gn).map(|u| gate_base + u).collect();

    // For each incidence position of v, the gate attachment (vertex,
    // dangling edge id in the gate).
    let positions: Vec<(usize, usize)> = (0..d)
        .map(|i| {
            let de = gate.dangling[i];
            let EdgeEnds::Dangling(att) = gate.graph.edges[de].ends else {
                unreachable!("validated dangling")
            };
            (att, de)
        })
        .collect();

    // Rewire host edges. A self-loop at v occupies two positions; its end 0
    // goes to the first position, end 1 to the second.
    let mut new_edges: Vec<SEdge> = Vec::with_capacity(host.edges.len() + gate.graph.edges.len());
    let mut seen_loop_once = alloc::vec![false; host.edges.len()];
    let mut end_target: Vec<[Option<usize>; 2]> = alloc::vec![[None, None]; host.edges.len()];
    for (i, &e) in host.incidence[v].iter().enumerate() {
        let att_new = gate_map[positions[i].0];
        match host.edges[e].ends {
            EdgeEnds::Internal(a, b) => {
                if a == v && b == v {
                    let slot = usize::from(seen_loop_once[e]);
                    seen_loop_once[e] = true;
                    end_target[e][slot] = Some(att_new);
                } else if a == v {
                    end_target[e][0] = Some(att_new);
                } else {
                    end_target[e][1] = Some(att_new);
                }
            }
            EdgeEnds::Dangling(_) => {
                end_target[e][0] = Some(att_new);
            }
        }
    }
    for (e, edge) in host.edges.iter().enumerate() {
        let ends = match edge.ends {
            EdgeEnds::Internal(a, b) => {
                let na = end_target[e][0].unwrap_or_else(|| host_map[a]);
                let nb = end_target[e][1].unwrap_or_else(|| host_map[b]);
                EdgeEnds::Internal(na, nb)
            }
            EdgeEnds::Dangling(a) => {
                EdgeEnds::Dangling(end_target[e][0].unwrap_or_else(|| host_map[a]))
            }
        };
        new_edges.push(SEdge { ends, weight: edge.weight.clone() });
    }
    // Gate internal edges appended; dangling edges are replaced by host
    // edges and map to them.
    let mut gate_edge_map = alloc::vec![usize::MAX; gate.graph.edges.len()];
    for (i, &de) in gate.dangling.iter().enumerate() {
        gate_edge_map[de] = host.incidence[v][i];
    }
    for (e, edge) in gate.graph.edges.iter().enumerate() {
        if gate_edge_map[e] != usize::MAX {
            continue;
        }
        let ends = match edge.ends {
            EdgeEnds::Internal(a, b) => EdgeEnds::Internal(gate_map[a], gate_map[b]),
            EdgeEnds::Dangling(a) => EdgeEnds::Dangling(gate_map[a]),
        };
        gate_edge_map[e] = new_edges.len();
        new_edges.push(SEdge { ends, weight: edge.weight.clone() });
    }

    // Signatures and incidence lists.
    let mut sigs = Vec::with_capacity(hn - 1 + gn);
    let mut incidence = Vec::with_capacity(hn - 1 + gn);
    for u in 0..hn {
        if u == v {
            continue;
        }
        sigs.push(host.sigs[u].clone());
        incidence.push(host.incidence[u].clone());
    }
    for u in 0..gn {
        sigs.push(gate.graph.sigs[u].clone());
        incidence.push(
            gate.graph.incidence[u]
                .iter()
                .map(|&e| gate_edge_map[e])
                .collect(),
        );
    }

    // Merge planar witnesses mechanically.
    let rotations = match (&host.rotations, &gate.graph.rotations) {
        (Some(hr), Some(gr)) => {
            let mut lists: Vec<Option<Vec<Dart>>> = Vec::with_capacity(hn - 1 + gn);
            for u in 0..hn {
                if u == v {
                    continue;
                }
                lists.push(hr.0[u].clone());
            }
            let v_embedded = hr.is_embedded(v);
            for u in 0..gn {
                let entry = if !v_embedded {
                    None
                } else {
                    gr.0[u].as_ref().map(|list| {
                        list.iter()
                            .map(|&(eid, end)| {
                                let ne = gate_edge_map[eid];
                                if gate.dangling.contains(&eid) {
                                    // The host edge end that now sits here.
                                    let host_end = match new_edges[ne].ends {
                                        EdgeEnds::Internal(a, _) if a == gate_map[u] => 0,
                                        EdgeEnds::Internal(_, b) if b == gate_map[u] => 1,
                                        _ => 0,
                                    };
                                    (ne, host_end as u8)
                                } else {
                                    (ne, end)
                                }
                            })
                            .collect()
                    })
                };
                lists.push(entry);
            }
            Some(Rotations(lists))
        }
        _ => None,
    };

    let graph = SignatureGraph::new(sigs, new_edges, incidence, rotations)?;
    Ok(Inserted { graph, host_vertex_map: host_map, gate_vertex_map: gate_map })
}

/// One constituent of a linear combination: a signature directly, or a
/// gate realizing it.
#[derive(Clone, Debug)]
pub enum Constituent {
    Sig(Signature),
    Gate(Gate),
}

impl Constituent {
    pub fn arity(&self) -> usize {
        match self {
            Constituent::Sig(s) => s.arity(),
            Constituent::Gate(g) => g.arity(),
        }
    }
}

/// A pointwise linear combination of constituents of a common arity.
#[derive(Clone, Debug)]
pub struct LinearCombination {
    pub terms: Vec<(Scalar, Constituent)>,
    pub target_arity: usize,
}

impl LinearCombination {
    pub fn new(terms: Vec<(Scalar, Constituent)>, target_arity: usize) -> Result<Self> {
        for (_, c) in &terms {
            if c.arity() != target_arity {
                return Err(Error::Arity { expected: target_arity, got: c.arity() });
            }
        }
        Ok(LinearCombination { terms, target_arity })
    }

    /// The pointwise sum of the combination as a dense signature.
    pub fn expanded_signature(&self, budget: &EvalBudget) -> Result<Signature> {
        let d = self.target_arity;
        let mut table = alloc::vec![Scalar::zero(); 1usize << d];
        for (c, constituent) in &self.terms {
            let sig = match constituent {
                Constituent::Sig(s) => s.clone(),
                Constituent::Gate(g) => gate_signature(g, budget)?,
            };
            for (i, v) in sig.to_table().into_iter().enumerate() {
                if !v.is_zero() {
                    table[i] = &table[i] + &(c * &v);
                }
            }
        }
        Signature::dense(d, table)
    }
}

/// Expands combinations at the given sites into the full branch list: for a
/// choice vector theta over the sites, the branch graph replaces each site
/// by its chosen constituent, and the branch coefficient is the product of
/// the chosen coefficients. Holant(host) equals the coefficient-weighted
/// sum of branch Holants.
pub fn expand_combination(
    host: &SignatureGraph,
    sites: &[(usize, LinearCombination)],
) -> Result<Vec<(Scalar, SignatureGraph)>> {
    for (v, lc) in sites {
        if host.incidence[*v].len() != lc.target_arity {
            return Err(Error::Arity {
                expected: host.incidence[*v].len(),
                got: lc.target_arity,
            });
        }
    }
    let k = sites.len();
    let mut branches = Vec::new();
    let mut theta = alloc::vec![0usize; k];
    loop {
        // Build the branch for the current theta.
        let mut coeff = Scalar::one();
        let mut graph = host.clone();
        // Vertex ids shift when gates are inserted; track current ids.
        let mut current_ids: Vec<usize> = sites.iter().map(|&(v, _)| v).collect();
        for (s, &(_, ref lc)) in sites.iter().enumerate() {
            let (c, constituent) = &lc.terms[theta[s]];
            coeff *= c;
            let v_now = current_ids[s];
            match constituent {
                Constituent::Sig(sig) => {
                    graph.sigs[v_now] = sig.clone();
                }
                Constituent::Gate(g) => {
                    let ins = insert_gate(&graph, v_now, g)?;
                    for id in current_ids.iter_mut() {
                        if *id != v_now {
                            *id = ins.host_vertex_map[*id];
                        }
                    }
                    graph = ins.graph;
                }
            }
        }
        branches.push((coeff, graph));
        // Next theta in mixed radix.
        let mut s = 0;
        loop {
            if s == k {
                return Ok(branches);
            }
            theta[s] += 1;
            if theta[s] < sites[s].1.terms.len() {
                break;
            }
            theta[s] = 0;
            s += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig_graph::{holant, SigGraphBuilder};

    /// A bare dangling edge attached to one HW=1 vertex.
    #[test]
    fn pendant_gate_signature() {
        let mut b = SigGraphBuilder::new();
        let v = b.add_vertex(Signature::hw1(1));
        let d = b.add_dangling(v);
        let gate = Gate::new(b.finish(None).unwrap(), alloc::vec![d]).unwrap();
        let sig = gate_signature(&gate, &EvalBudget::default()).unwrap();
        assert_eq!(sig.to_table(), alloc::vec![Scalar::zero(), Scalar::one()]);
    }

    /// A single vertex with signature s and d dangling edges realizes s.
    #[test]
    fn identity_gate_signature() {
        let mut b = SigGraphBuilder::new();
        let v = b.add_vertex(Signature::pass());
        let ds: Vec<usize> = (0..4).map(|_| b.add_dangling(v)).collect();
        let gate = Gate::new(b.finish(None).unwrap(), ds).unwrap();
        let sig = gate_signature(&gate, &EvalBudget::default()).unwrap();
        assert_eq!(sig.to_table(), Signature::pass().to_table());
    }

    fn pass_star_host() -> SignatureGraph {
        let mut b = SigGraphBuilder::new();
        let center = b.add_vertex(Signature::pass());
        for _ in 0..4 {
            let leaf = b.add_vertex(Signature::hw1(1));
            b.add_edge(center, leaf, Scalar::one());
        }
        b.finish(None).unwrap()
    }

    #[test]
    fn identity_insertion_preserves_holant() {
        let host = pass_star_host();
        let before = holant(&host).unwrap();
        let mut b = SigGraphBuilder::new();
        let v = b.add_vertex(Signature::pass());
        let ds: Vec<usize> = (0..4).map(|_| b.add_dangling(v)).collect();
        let gate = Gate::new(b.finish(None).unwrap(), ds).unwrap();
        let ins = insert_gate(&host, 0, &gate).unwrap();
        assert_eq!(holant(&ins.graph).unwrap(), before);
        assert_eq!(before, -Scalar::one());
    }

    #[test]
    fn combination_identity_single_site() {
        let host = pass_star_host();
        let before = holant(&host).unwrap();
        // PASS = 1/2 * PASS + 1/2 * PASS, as a two-term combination.
        let lc = LinearCombination::new(
            alloc::vec![
                (Scalar::ratio(1, 2), Constituent::Sig(Signature::pass())),
                (Scalar::ratio(1, 2), Constituent::Sig(Signature::pass())),
            ],
            4,
        )
        .unwrap();
        let branches = expand_combination(&host, &[(0, lc)]).unwrap();
        assert_eq!(branches.len(), 2);
        let mut acc = Scalar::zero();
        for (c, g) in &branches {
            acc += &(c * &holant(g).unwrap());
        }
        assert_eq!(acc, before);
    }

    #[test]
    fn theta_coefficients_multiply() {
        // Two sites with 2 terms each: 4 branches, product coefficients.
        let mut b = SigGraphBuilder::new();
        let u = b.add_vertex(Signature::hw1(1));
        let v = b.add_vertex(Signature::hw1(1));
        b.add_edge(u, v, Scalar::one());
        let host = b.finish(None).unwrap();
        let lc = |c1: i64, c2: i64| {
            LinearCombination::new(
                alloc::vec![
                    (Scalar::from_int(c1), Constituent::Sig(Signature::hw1(1))),
                    (Scalar::from_int(c2), Constituent::Sig(Signature::hw1(1))),
                ],
                1,
            )
            .unwrap()
        };
        let branches = expand_combination(&host, &[(0, lc(2, 3)), (1, lc(5, 7))]).unwrap();
        let coeffs: Vec<Scalar> = branches.iter().map(|(c, _)| c.clone()).collect();
        assert_eq!(
            coeffs,
            alloc::vec![
                Scalar::from_int(10),
                Scalar::from_int(15),
                Scalar::from_int(14),
                Scalar::from_int(21)
            ]
        );
    }
}
