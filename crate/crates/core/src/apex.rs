//! The k-apex permanent pipeline: the cell signature graph G(A) encoding a
//! grid-tiling instance as a Holant, the cell gates realizing the cell
//! signatures, the two-term combined realization of the checking cells,
//! and the branch graphs whose apex-evaluated PerfMatch values combine to
//! the tiling count.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::embedding::{Dart, Rotations};
use crate::error::{Error, Result};
use crate::fkt::perfmatch_apex;
use crate::gate::{gate_signature, insert_gate, Constituent, Gate, LinearCombination};
use crate::graph::WeightedGraph;
use crate::gridtiling::{count_tilings, BalanceDirection, GridTilingInstance};
use crate::matchgates::{build_act_gate, build_pass_matchgate, build_pre_matchgate};
use crate::scalar::Scalar;
use crate::sig_graph::{EdgeEnds, EvalBudget, SEdge, SignatureGraph};
use crate::signature::{Builtin, CellKind, CellSignature, Signature};

/// The signature graph G(A): a k x k grid of cells carrying the lazily
/// evaluated propagate / propagate-and-check signatures, border vertices
/// with HW=1, and bundles of n parallel edges between adjacent vertices.
#[derive(Clone, Debug)]
pub struct CellGraph {
    pub graph: SignatureGraph,
    /// Cell vertex ids in row-major order (kappa = (i, j), 1-based).
    pub cell_ids: Vec<usize>,
    pub n: usize,
    pub k: usize,
}

impl CellGraph {
    pub fn cell_vertex(&self, i: usize, j: usize) -> usize {
        self.cell_ids[(i - 1) * self.k + (j - 1)]
    }
}

/// Builds G(A) for a (vertically balanced) instance. Its Holant equals the
/// tiling count: each satisfying assignment activates one edge per bundle,
/// encoding the row and column values, and has value 1.
pub fn build_cell_graph(t: &GridTilingInstance) -> Result<CellGraph> {
    let (n, k) = (t.n, t.k);
    if n == 0 || k == 0 {
        return Err(Error::Malformed("empty instance".into()));
    }
    // Vertices: cells row-major, then border N, E, S, W (k each).
    let cells = k * k;
    let cell_id = |i: usize, j: usize| (i - 1) * k + (j - 1);
    let border_n = |j: usize| cells + (j - 1);
    let border_e = |i: usize| cells + k + (i - 1);
    let border_s = |j: usize| cells + 2 * k + (j - 1);
    let border_w = |i: usize| cells + 3 * k + (i - 1);
    let total = cells + 4 * k;

    let mut sigs: Vec<Signature> = Vec::with_capacity(total);
    for i in 1..=k {
        for j in 1..=k {
            let kind = match t.constraints.get(&(i, j)) {
                Some(set) => CellKind::PropagateCheck(set.clone()),
                None => CellKind::Propagate,
            };
            let _ = cell_id(i, j);
            sigs.push(Signature::Lazy(CellSignature { n, kind }));
        }
    }
    for _ in 0..4 * k {
        sigs.push(Signature::hw1(n));
    }

    // Bundles: vertical[i][j] joins the vertex above row i+1 in column j
    // (i = 0 is the north border) to the one below; horizontal[i][j] joins
    // the vertex left of column j+1 in row i.
    let mut edges: Vec<SEdge> = Vec::new();
    let mut vertical = alloc::vec![alloc::vec![Vec::new(); k + 1]; 1];
    vertical.clear();
    let mut horizontal: Vec<Vec<Vec<usize>>> = Vec::new();
    for i in 0..=k {
        let mut row = Vec::new();
        for j in 1..=k {
            let upper = if i == 0 { border_n(j) } else { cell_id(i, j) };
            let lower = if i == k { border_s(j) } else { cell_id(i + 1, j) };
            let mut bundle = Vec::with_capacity(n);
            for _ in 0..n {
                edges.push(SEdge {
                    ends: EdgeEnds::Internal(upper, lower),
                    weight: Scalar::one(),
                });
                bundle.push(edges.len() - 1);
            }
            row.push(bundle);
        }
        vertical.push(row);
    }
    for i in 1..=k {
        let mut row = Vec::new();
        for j in 0..=k {
            let left = if j == 0 { border_w(i) } else { cell_id(i, j) };
            let right = if j == k { border_e(i) } else { cell_id(i, j + 1) };
            let mut bundle = Vec::with_capacity(n);
            for _ in 0..n {
                edges.push(SEdge {
                    ends: EdgeEnds::Internal(left, right),
                    weight: Scalar::one(),
                });
                bundle.push(edges.len() - 1);
            }
            row.push(bundle);
        }
        horizontal.push(row);
    }
    let vbundle = |i: usize, j: usize| &vertical[i][j - 1];
    let hbundle = |i: usize, j: usize| &horizontal[i - 1][j];

    // Incidence: cells read (N, E, S, W) blocks in value order; borders
    // read their bundle in value order.
    let mut incidence: Vec<Vec<usize>> = alloc::vec![Vec::new(); total];
    for i in 1..=k {
        for j in 1..=k {
            let mut l = Vec::with_capacity(4 * n);
            l.extend(vbundle(i - 1, j));
            l.extend(hbundle(i, j));
            l.extend(vbundle(i, j));
            l.extend(hbundle(i, j - 1));
            incidence[cell_id(i, j)] = l;
        }
    }
    for j in 1..=k {
        incidence[border_n(j)] = vbundle(0, j).clone();
        incidence[border_s(j)] = vbundle(k, j).clone();
    }
    for i in 1..=k {
        incidence[border_w(i)] = hbundle(i, 0).clone();
        incidence[border_e(i)] = hbundle(i, k).clone();
    }

    // Rotations, counterclockwise with rows growing downward: each block
    // read (E descending, N descending, W ascending, S ascending); bundle
    // ends see each other reversed.
    let mut rotations: Vec<Option<Vec<Dart>>> = alloc::vec![None; total];
    for i in 1..=k {
        for j in 1..=k {
            let mut l: Vec<Dart> = Vec::with_capacity(4 * n);
            l.extend(hbundle(i, j).iter().rev().map(|&e| (e, 0)));
            l.extend(vbundle(i - 1, j).iter().rev().map(|&e| (e, 1)));
            l.extend(hbundle(i, j - 1).iter().map(|&e| (e, 1)));
            l.extend(vbundle(i, j).iter().map(|&e| (e, 0)));
            rotations[cell_id(i, j)] = Some(l);
        }
    }
    for j in 1..=k {
        rotations[border_n(j)] = Some(vbundle(0, j).iter().map(|&e| (e, 0)).collect());
        rotations[border_s(j)] =
            Some(vbundle(k, j).iter().rev().map(|&e| (e, 1)).collect());
    }
    for i in 1..=k {
        rotations[border_w(i)] = Some(hbundle(i, 0).iter().rev().map(|&e| (e, 0)).collect());
        rotations[border_e(i)] = Some(hbundle(i, k).iter().map(|&e| (e, 1)).collect());
    }

    let graph = SignatureGraph::new(sigs, edges, incidence, Some(Rotations(rotations)))?;
    Ok(CellGraph {
        graph,
        cell_ids: (0..cells).collect(),
        n,
        k,
    })
}

/// Grid cell gates share this layout: an n x n grid of crossing vertices
/// b_{u,v} (row u = western value, column v = northern value), port value
/// v of the north side entering b_{1,v} and so on. Returns the builder
/// pieces: signatures, edges, incidence, rotations, dangling list.
pub(crate) struct GridGate {
    pub sigs: Vec<Signature>,
    pub edges: Vec<SEdge>,
    pub incidence: Vec<Vec<usize>>,
    pub rotations: Vec<Option<Vec<Dart>>>,
    pub dangling: Vec<usize>,
}

pub(crate) fn grid_gate_core(n: usize) -> GridGate {
    let cells = n * n;
    let id = |u: usize, v: usize| (u - 1) * n + (v - 1);
    let sigs = alloc::vec![Signature::pass(); cells];
    let mut edges: Vec<SEdge> = Vec::new();
    // Edge catalog per vertex slot: N, E, S, W; danglings on the rim.
    let mut north = alloc::vec![alloc::vec![usize::MAX; n + 1]; n + 1];
    let mut west = alloc::vec![alloc::vec![usize::MAX; n + 1]; n + 1];
    let mut dangling = Vec::with_capacity(4 * n);
    // Vertical edges: north[u][v] is the edge above b_{u,v}.
    for v in 1..=n {
        for u in 1..=n {
            let ends = if u == 1 {
                EdgeEnds::Dangling(id(1, v))
            } else {
                EdgeEnds::Internal(id(u - 1, v), id(u, v))
            };
            edges.push(SEdge { ends, weight: Scalar::one() });
            north[u][v] = edges.len() - 1;
        }
        // Southern dangling of column v.
        edges.push(SEdge { ends: EdgeEnds::Dangling(id(n, v)), weight: Scalar::one() });
        north[0][v] = edges.len() - 1; // slot reused: the south rim edge
    }
    // Horizontal edges: west[u][v] is the edge left of b_{u,v}.
    for u in 1..=n {
        for v in 1..=n {
            let ends = if v == 1 {
                EdgeEnds::Dangling(id(u, 1))
            } else {
                EdgeEnds::Internal(id(u, v - 1), id(u, v))
            };
            edges.push(SEdge { ends, weight: Scalar::one() });
            west[u][v] = edges.len() - 1;
        }
        edges.push(SEdge { ends: EdgeEnds::Dangling(id(u, n)), weight: Scalar::one() });
        west[u][0] = edges.len() - 1; // the east rim edge
    }
    let south = |u: usize, v: usize| if u == n { north[0][v] } else { north[u + 1][v] };
    let east = |u: usize, v: usize| if v == n { west[u][0] } else { west[u][v + 1] };
    let mut incidence = alloc::vec![Vec::new(); cells];
    let mut rotations: Vec<Option<Vec<Dart>>> = alloc::vec![None; cells];
    for u in 1..=n {
        for v in 1..=n {
            incidence[id(u, v)] =
                alloc::vec![north[u][v], east(u, v), south(u, v), west[u][v]];
            // Counterclockwise E, N, W, S; dart ends: an internal vertical
            // edge has end 1 at the lower vertex, horizontal end 1 at the
            // right vertex; rim edges dangle with end 0.
            let dart = |e: usize, end_internal: u8| -> Dart {
                match edges[e].ends {
                    EdgeEnds::Dangling(_) => (e, 0),
                    EdgeEnds::Internal(..) => (e, end_internal),
                }
            };
            rotations[id(u, v)] = Some(alloc::vec![
                dart(east(u, v), 0),
                dart(north[u][v], 1),
                dart(west[u][v], 1),
                dart(south(u, v), 0),
            ]);
        }
    }
    // Dangling labels: N block (v = 1..n), E block (u = 1..n), S, W.
    for v in 1..=n {
        dangling.push(north[1][v]);
    }
    for u in 1..=n {
        dangling.push(east(u, n));
    }
    for v in 1..=n {
        dangling.push(south(n, v));
    }
    for u in 1..=n {
        dangling.push(west[u][1]);
    }
    GridGate { sigs, edges, incidence, rotations, dangling }
}

/// The propagation cell gate: an n x n grid of crossings plus the forced
/// edge of weight -1 that cancels the sign of the unique crossing point.
pub fn build_phi(n: usize) -> Result<Gate> {
    let mut core = grid_gate_core(n);
    let h1 = core.sigs.len();
    core.sigs.push(Signature::hw1(1));
    core.sigs.push(Signature::hw1(1));
    core.edges.push(SEdge { ends: EdgeEnds::Internal(h1, h1 + 1), weight: -Scalar::one() });
    let eid = core.edges.len() - 1;
    core.incidence.push(alloc::vec![eid]);
    core.incidence.push(alloc::vec![eid]);
    core.rotations.push(Some(alloc::vec![(eid, 0)]));
    core.rotations.push(Some(alloc::vec![(eid, 1)]));
    let graph = SignatureGraph::new(
        core.sigs,
        core.edges,
        core.incidence,
        Some(Rotations(core.rotations)),
    )?;
    Gate::new(graph, core.dangling)
}

/// The checking cell gate: the grid with ACT at the constraint pairs, two
/// apex vertices adjacent to exactly those, and no -1 edge. Requires the
/// vertical balance |A ∩ (*, v)| = T for every column v.
pub fn build_phi_prime(set: &BTreeSet<(usize, usize)>, n: usize, t_balance: usize) -> Result<Gate> {
    check_column_balance(set, n, t_balance)?;
    let mut core = grid_gate_core(n);
    let id = |u: usize, v: usize| (u - 1) * n + (v - 1);
    let a1 = core.sigs.len();
    core.sigs.push(Signature::hw1(set.len()));
    core.sigs.push(Signature::hw1(set.len()));
    let a2 = a1 + 1;
    core.incidence.push(Vec::new());
    core.incidence.push(Vec::new());
    core.rotations.push(None);
    core.rotations.push(None);
    for &(u, v) in set {
        let b = id(u, v);
        core.sigs[b] = Signature::act();
        let e1 = core.edges.len();
        core.edges.push(SEdge { ends: EdgeEnds::Internal(a1, b), weight: Scalar::one() });
        let e2 = core.edges.len();
        core.edges.push(SEdge { ends: EdgeEnds::Internal(a2, b), weight: Scalar::one() });
        core.incidence[b].push(e1);
        core.incidence[b].push(e2);
        core.incidence[a1].push(e1);
        core.incidence[a2].push(e2);
    }
    let graph = SignatureGraph::new(
        core.sigs,
        core.edges,
        core.incidence,
        Some(Rotations(core.rotations)),
    )?;
    Gate::new(graph, core.dangling)
}

fn check_column_balance(set: &BTreeSet<(usize, usize)>, n: usize, t: usize) -> Result<()> {
    let mut counts = alloc::vec![0usize; n + 1];
    for &(u, v) in set {
        if u == 0 || v == 0 || u > n || v > n {
            return Err(Error::Malformed("pair outside the grid".into()));
        }
        counts[v] += 1;
    }
    if counts[1..].iter().any(|&c| c != t) {
        return Err(Error::Validation(alloc::format!(
            "set is not vertically balanced with T={t}"
        )));
    }
    Ok(())
}

/// The two-term combined realization of the checking signature:
/// g = (T/2) Sig(phi) + (1/2) Sig(phi'), pointwise on one-hot inputs.
pub fn g_combination(
    set: &BTreeSet<(usize, usize)>,
    n: usize,
    t_balance: usize,
) -> Result<LinearCombination> {
    let phi = build_phi(n)?;
    let phi_prime = build_phi_prime(set, n, t_balance)?;
    LinearCombination::new(
        alloc::vec![
            (Scalar::ratio(t_balance as i64, 2), Constituent::Gate(phi)),
            (Scalar::ratio(1, 2), Constituent::Gate(phi_prime)),
        ],
        4 * n,
    )
}

/// One branch of the combined grid-tiling equation.
#[derive(Clone, Debug)]
pub struct ApexBranch {
    /// Choice per constraint cell (in BTreeMap order): true picks phi.
    pub omega: Vec<bool>,
    pub coefficient: Scalar,
    pub graph: WeightedGraph,
    pub apices: Vec<usize>,
    pub rotations: Rotations,
}

/// Flattens every named crossing signature through its matchgate; the
/// result carries HW=1 everywhere.
pub fn flatten_matchgates(mut graph: SignatureGraph) -> Result<SignatureGraph> {
    let pass = build_pass_matchgate();
    let pre = build_pre_matchgate();
    let act = build_act_gate();
    loop {
        let Some((v, kind)) = graph.sigs.iter().enumerate().find_map(|(v, s)| match s {
            Signature::Builtin { kind: k @ (Builtin::Pass | Builtin::Pre | Builtin::Act), .. } => {
                Some((v, *k))
            }
            _ => None,
        }) else {
            return Ok(graph);
        };
        let gate = match kind {
            Builtin::Pass => &pass.gate,
            Builtin::Pre => &pre.gate,
            Builtin::Act => &act.gate,
            _ => unreachable!(),
        };
        graph = insert_gate(&graph, v, gate)?.graph;
    }
}

/// Extracts the weighted graph, apex list and apex-excluded rotation
/// witness from a flattened branch. Apices are exactly the vertices the
/// witness excludes.
pub fn branch_to_weighted(graph: &SignatureGraph) -> Result<(WeightedGraph, Vec<usize>, Rotations)> {
    let (g, rot) = graph.to_weighted()?;
    let rot = rot.ok_or_else(|| Error::Malformed("branch lost its embedding".into()))?;
    let apices = (0..g.n).filter(|&v| !rot.is_embedded(v)).collect();
    Ok((g, apices, rot))
}

/// Builds all 2^{|C|} branch graphs H_omega of the combined grid-tiling
/// equation, fully flattened, with coefficients T^{d(omega)} / 2^{|C|}.
pub fn apex_branch_graphs(t: &GridTilingInstance) -> Result<Vec<ApexBranch>> {
    let Some(t_balance) = t.is_balanced(BalanceDirection::Vertical) else {
        return Err(Error::Validation(
            "instance must be vertically balanced; run balance first".into(),
        ));
    };
    let cg = build_cell_graph(t)?;
    let phi = build_phi(t.n)?;
    let cells: Vec<(usize, usize)> = t.constraint_cells();
    let c = cells.len();
    let mut out = Vec::with_capacity(1 << c);
    for mask in 0..1u32 << c {
        let omega: Vec<bool> = (0..c).map(|i| (mask >> i) & 1 == 0).collect();
        let mut d = 0usize;
        // Insert a gate at every cell, tracking index shifts.
        let mut ids: Vec<usize> = cg.cell_ids.clone();
        let mut graph = cg.graph.clone();
        for i in 1..=t.k {
            for j in 1..=t.k {
                let idx = (i - 1) * t.k + (j - 1);
                let gate = match cells.iter().position(|&kappa| kappa == (i, j)) {
                    None => phi.clone(),
                    Some(ci) => {
                        if omega[ci] {
                            d += 1;
                            phi.clone()
                        } else {
                            build_phi_prime(&t.constraints[&(i, j)], t.n, t_balance)?
                        }
                    }
                };
                let ins = insert_gate(&graph, ids[idx], &gate)?;
                for id in ids.iter_mut() {
                    if *id != usize::MAX {
                        *id = ins.host_vertex_map.get(*id).copied().unwrap_or(usize::MAX);
                    }
                }
                ids[idx] = usize::MAX;
                graph = ins.graph;
            }
        }
        let flat = flatten_matchgates(graph)?;
        let (g, apices, rotations) = branch_to_weighted(&flat)?;
        let coefficient = &Scalar::ratio(t_balance as i64, 1).pow(d as u64)
            * &Scalar::ratio(1, 2).pow(c as u64);
        out.push(ApexBranch { omega, coefficient, graph: g, apices, rotations });
    }
    Ok(out)
}

/// Abstract branch graphs: the host with dense gate signatures at the
/// cells instead of inserted gates; their Holants satisfy the same
/// combination identity by the insertion lemma.
pub fn apex_branch_holants(t: &GridTilingInstance, budget: &EvalBudget) -> Result<Scalar> {
    let Some(t_balance) = t.is_balanced(BalanceDirection::Vertical) else {
        return Err(Error::Validation("instance must be vertically balanced".into()));
    };
    let cg = build_cell_graph(t)?;
    let phi_sig = gate_signature(&build_phi(t.n)?, budget)?;
    let cells = t.constraint_cells();
    let mut sites = Vec::new();
    for &(i, j) in &cells {
        let phi_prime_sig =
            gate_signature(&build_phi_prime(&t.constraints[&(i, j)], t.n, t_balance)?, budget)?;
        let lc = LinearCombination::new(
            alloc::vec![
                (Scalar::ratio(t_balance as i64, 2), Constituent::Sig(phi_sig.clone())),
                (Scalar::ratio(1, 2), Constituent::Sig(phi_prime_sig)),
            ],
            4 * t.n,
        )?;
        sites.push((cg.cell_vertex(i, j), lc));
    }
    // Non-constraint cells get the plain phi signature directly.
    let mut host = cg.graph.clone();
    for i in 1..=t.k {
        for j in 1..=t.k {
            if !t.constraints.contains_key(&(i, j)) {
                host.sigs[cg.cell_vertex(i, j)] = phi_sig.clone();
            }
        }
    }
    let branches = crate::gate::expand_combination(&host, &sites)?;
    let mut acc = Scalar::zero();
    for (coeff, branch) in &branches {
        acc += &(coeff * &crate::sig_graph::holant_with(branch, budget)?);
    }
    Ok(acc)
}

/// Verification report for the combined grid-tiling equation.
#[derive(Clone, Debug)]
pub struct CombinedReport {
    pub tilings: u64,
    pub combination: Scalar,
    pub branch_values: Vec<(Vec<bool>, Scalar)>,
    pub ok: bool,
}

/// The flagship check: the brute-force tiling count equals the
/// coefficient-weighted sum of apex-evaluated PerfMatch values over all
/// branches, exactly.
pub fn verify_combined_gridtiling(t: &GridTilingInstance) -> Result<CombinedReport> {
    let tilings = count_tilings(t)?;
    let branches = apex_branch_graphs(t)?;
    let mut acc = Scalar::zero();
    let mut branch_values = Vec::new();
    for b in &branches {
        let pm = perfmatch_apex(&b.graph, &b.apices, &b.rotations)?;
        acc += &(&b.coefficient * &pm);
        branch_values.push((b.omega.clone(), pm));
    }
    let ok = acc == Scalar::from_int(tilings as i64);
    Ok(CombinedReport { tilings, combination: acc, branch_values, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;
    use crate::bits::{bits_of, one_hot_position};
    use crate::sig_graph::holant;

    fn simple_instance() -> GridTilingInstance {
        let constraints = [((1, 1), [(1, 1), (2, 2)].into_iter().collect())]
            .into_iter()
            .collect();
        GridTilingInstance::new(2, 1, constraints).unwrap()
    }

    #[test]
    fn cell_graph_holant_counts_tilings() {
        let t = simple_instance();
        let cg = build_cell_graph(&t).unwrap();
        // Census: k^2 + 4k vertices, n(2k(k-1) + 4k) edges.
        assert_eq!(cg.graph.vertex_count(), 1 + 4);
        assert_eq!(cg.graph.edge_count(), 2 * 4);
        assert_eq!(holant(&cg.graph).unwrap(), Scalar::from_int(2));
    }

    #[test]
    fn cell_graph_unconstrained_power() {
        let t = GridTilingInstance::new(2, 2, BTreeMap::new()).unwrap();
        let cg = build_cell_graph(&t).unwrap();
        assert_eq!(cg.graph.vertex_count(), 4 + 8);
        assert_eq!(cg.graph.edge_count(), 2 * (2 * 2 * 1 + 4 * 2));
        assert_eq!(holant(&cg.graph).unwrap(), Scalar::from_int(16));
    }

    #[test]
    fn cell_graph_embedding_is_valid() {
        let t = GridTilingInstance::new(2, 2, BTreeMap::new()).unwrap();
        let cg = build_cell_graph(&t).unwrap();
        let (g, rot) = crate::gate::embedded_view_of(&cg.graph).unwrap().unwrap();
        crate::embedding::validate_rotations(&g, &rot).unwrap();
        crate::embedding::euler_check(&g, &rot).unwrap();
    }

    /// Evaluates phi_one / phi_prop case analysis of a dense cell table.
    fn check_cell_formulas(
        table: &[Scalar],
        n: usize,
        expect: impl Fn(usize, usize, bool) -> Scalar,
    ) {
        for idx in 0..table.len() {
            let bits = bits_of(idx, 4 * n);
            let (xn, rest) = bits.split_at(n);
            let (xe, rest) = rest.split_at(n);
            let (xs, xw) = rest.split_at(n);
            let (Some(v), Some(u)) = (one_hot_position(xn), one_hot_position(xw)) else {
                continue;
            };
            if xn != xs || xw != xe {
                assert_eq!(table[idx], Scalar::zero(), "non-propagating input {idx}");
                continue;
            }
            assert_eq!(table[idx], expect(u + 1, v + 1, true), "wanted input {idx}");
        }
    }

    #[test]
    fn phi_signature_formula() {
        for n in 1..=3 {
            let phi = build_phi(n).unwrap();
            phi.check_witness().unwrap();
            let table = gate_signature(&phi, &EvalBudget::default()).unwrap().to_table();
            check_cell_formulas(&table, n, |_, _, _| Scalar::one());
        }
    }

    #[test]
    fn phi_all_zero_input_is_minus_one() {
        let phi = build_phi(2).unwrap();
        let table = gate_signature(&phi, &EvalBudget::default()).unwrap().to_table();
        assert_eq!(table[0], -Scalar::one());
    }

    #[test]
    fn phi_prime_signature_formula() {
        // n = 2, A = {(1,1),(2,2)}, T = 1.
        let set: BTreeSet<(usize, usize)> = [(1, 1), (2, 2)].into_iter().collect();
        let phi_prime = build_phi_prime(&set, 2, 1).unwrap();
        let table = gate_signature(&phi_prime, &EvalBudget::default()).unwrap().to_table();
        check_cell_formulas(&table, 2, |u, v, _| {
            if set.contains(&(u, v)) {
                Scalar::from_int(1) // -T + 2
            } else {
                Scalar::from_int(-1) // -T
            }
        });
        // Unbalanced set rejected.
        let bad: BTreeSet<(usize, usize)> = [(1, 1), (2, 1)].into_iter().collect();
        assert!(build_phi_prime(&bad, 2, 1).is_err());
    }

    #[test]
    fn phi_prime_formula_many_random_sets() {
        use rand::rngs::SmallRng;
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let mut rng = SmallRng::seed_from_u64(43);
        for trial in 0..20 {
            let n = if trial % 3 == 0 { 3 } else { 2 };
            let t = rng.gen_range(1..=n);
            // Random balanced set: t entries per column.
            let mut set = BTreeSet::new();
            for v in 1..=n {
                let mut rows: Vec<usize> = (1..=n).collect();
                rows.shuffle(&mut rng);
                for &u in rows.iter().take(t) {
                    set.insert((u, v));
                }
            }
            let phi_prime = build_phi_prime(&set, n, t).unwrap();
            let table =
                gate_signature(&phi_prime, &EvalBudget::default()).unwrap().to_table();
            check_cell_formulas(&table, n, |u, v, _| {
                if set.contains(&(u, v)) {
                    Scalar::from_int(2 - t as i64)
                } else {
                    Scalar::from_int(-(t as i64))
                }
            });
        }
    }

    #[test]
    fn g_combination_realizes_check() {
        let set: BTreeSet<(usize, usize)> = [(1, 1), (2, 2)].into_iter().collect();
        let lc = g_combination(&set, 2, 1).unwrap();
        let sig = lc.expanded_signature(&EvalBudget::default()).unwrap();
        let table = sig.to_table();
        check_cell_formulas(&table, 2, |u, v, _| {
            if set.contains(&(u, v)) {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        });
    }

    #[test]
    fn combined_gridtiling_simple_fixture() {
        let report = verify_combined_gridtiling(&simple_instance()).unwrap();
        assert!(report.ok, "{report:?}");
        assert_eq!(report.tilings, 2);
        assert_eq!(report.branch_values.len(), 2);
    }

    #[test]
    fn abstract_branches_agree() {
        let t = simple_instance();
        let h = apex_branch_holants(&t, &EvalBudget::default()).unwrap();
        assert_eq!(h, Scalar::from_int(2));
    }

    #[test]
    fn branch_weights_and_apex_conditions() {
        let t = simple_instance();
        let branches = apex_branch_graphs(&t).unwrap();
        for b in &branches {
            let mut is_apex = alloc::vec![false; b.graph.n];
            for &a in &b.apices {
                is_apex[a] = true;
            }
            // Weight set {-1, 1/2, 1}; non-unit weights never at apices.
            for e in &b.graph.edges {
                let w = &e.weight;
                assert!(
                    w.is_one() || *w == -Scalar::one() || *w == Scalar::ratio(1, 2),
                    "weight {w}"
                );
                if !w.is_one() {
                    assert!(!is_apex[e.u] && !is_apex[e.v]);
                }
            }
            // Apices form an independent set; non-apex vertices touch at
            // most one apex.
            let mut apex_deg = alloc::vec![0usize; b.graph.n];
            for e in &b.graph.edges {
                assert!(!(is_apex[e.u] && is_apex[e.v]));
                if is_apex[e.u] {
                    apex_deg[e.v] += 1;
                }
                if is_apex[e.v] {
                    apex_deg[e.u] += 1;
                }
            }
            for v in 0..b.graph.n {
                if !is_apex[v] {
                    assert!(apex_deg[v] <= 1);
                }
            }
        }
    }

    #[test]
    fn all_phi_branch_is_planar_and_bipartite() {
        let t = simple_instance();
        let branches = apex_branch_graphs(&t).unwrap();
        let all_phi = branches.iter().find(|b| b.omega.iter().all(|&x| x)).unwrap();
        assert!(all_phi.apices.is_empty());
        // 2-colorable.
        let adj = all_phi.graph.adjacency();
        let mut color = alloc::vec![u8::MAX; all_phi.graph.n];
        for s in 0..all_phi.graph.n {
            if color[s] != u8::MAX {
                continue;
            }
            color[s] = 0;
            let mut stack = alloc::vec![s];
            while let Some(v) = stack.pop() {
                for &(_, w) in &adj[v] {
                    if color[w] == u8::MAX {
                        color[w] = 1 - color[v];
                        stack.push(w);
                    } else {
                        assert_ne!(color[w], color[v]);
                    }
                }
            }
        }
    }
}
