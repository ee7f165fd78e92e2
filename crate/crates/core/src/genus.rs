//! PerfMatch for graphs given as plane models: handles (grid caps) and
//! cross caps are expanded into linear combinations of planar matchgate
//! constituents, each evaluated by FKT, and combined exactly.

use alloc::vec::Vec;

use crate::embedding::{Dart, EmbeddedGraph, Rotations};
use crate::error::{Error, Result};
use crate::fkt::perfmatch_fkt;
use crate::gate::{insert_gate, Gate};
use crate::graph::WeightedGraph;
use crate::scalar::{solve_linear_system, Scalar};
use crate::sig_graph::{EdgeEnds, SEdge, SignatureGraph};
use crate::signature::{Builtin, Signature};

/// One edge of a bunch: the graph edge and which endpoint lies on the exit
/// side of the polygon.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BunchEdge {
    pub edge: usize,
    pub exit_end: u8,
}

/// A handle: two bunches leaving through interleaved side pairs
/// a b a^-1 b^-1; their strands cross in a grid when flattened.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Handle {
    pub bunch_a: Vec<BunchEdge>,
    pub bunch_b: Vec<BunchEdge>,
}

/// A cross cap: one bunch re-entering in the same order; its strands cross
/// pairwise when flattened.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CrossCap {
    pub bunch: Vec<BunchEdge>,
}

/// A polygon-with-identified-sides description of an embedded graph: the
/// interior drawing (rotation system) plus the edge bunches crossing the
/// polygon sides. The rotation system describes the surface embedding, so
/// no Euler check applies to the model itself; the expanded constituents
/// are checked instead.
#[derive(Clone, Debug)]
pub struct PlaneModel {
    pub graph: WeightedGraph,
    pub rotations: Rotations,
    pub handles: Vec<Handle>,
    pub crosscaps: Vec<CrossCap>,
}

impl PlaneModel {
    pub fn validate(&self) -> Result<()> {
        crate::embedding::validate_rotations(&self.graph, &self.rotations)?;
        if self.crosscaps.len() > 2 {
            return Err(Error::Malformed(
                "more than two cross caps; normalize the surface first".into(),
            ));
        }
        let mut seen = alloc::vec![false; self.graph.edges.len()];
        let mut mark = |be: &BunchEdge| -> Result<()> {
            if be.edge >= seen.len() || be.exit_end > 1 {
                return Err(Error::Malformed("bunch edge out of range".into()));
            }
            if seen[be.edge] {
                return Err(Error::Malformed("edge in two bunches".into()));
            }
            seen[be.edge] = true;
            Ok(())
        };
        for h in &self.handles {
            for be in h.bunch_a.iter().chain(&h.bunch_b) {
                mark(be)?;
            }
        }
        for c in &self.crosscaps {
            for be in &c.bunch {
                mark(be)?;
            }
        }
        Ok(())
    }

    pub fn constituent_count(&self) -> usize {
        (1usize << (2 * self.handles.len())) << self.crosscaps.len()
    }
}

/// One term of a cap expansion: a coefficient and one weight multiplier
/// per bunch of the cap, applied to every strand of that bunch.
#[derive(Clone, Debug)]
pub struct CapTerm {
    pub coefficient: Scalar,
    pub multipliers: Vec<Scalar>,
}

/// A cap as a linear combination of sign-twisted planar constituents.
#[derive(Clone, Debug)]
pub struct CapExpansion {
    pub terms: Vec<CapTerm>,
}

/// The four-term grid cap expansion: coefficients {1/2, 1/2, 1/2, -1/2}
/// with -1 twists on neither, either, or both bunches.
pub fn grid_cap_expansion() -> CapExpansion {
    let h = Scalar::ratio(1, 2);
    let one = Scalar::one();
    let neg = -Scalar::one();
    CapExpansion {
        terms: alloc::vec![
            CapTerm { coefficient: h.clone(), multipliers: alloc::vec![one.clone(), one.clone()] },
            CapTerm { coefficient: h.clone(), multipliers: alloc::vec![neg.clone(), one.clone()] },
            CapTerm { coefficient: h.clone(), multipliers: alloc::vec![one, neg.clone()] },
            CapTerm { coefficient: -h, multipliers: alloc::vec![neg.clone(), neg] },
        ],
    }
}

/// The two-term cross cap expansion: (1-i)/2 with twist i and (1+i)/2
/// with twist -i on the single bunch.
pub fn cross_cap_expansion() -> CapExpansion {
    let half = Scalar::ratio(1, 2);
    let c1 = &(&Scalar::one() - &Scalar::i()) * &half;
    let c2 = &(&Scalar::one() + &Scalar::i()) * &half;
    CapExpansion {
        terms: alloc::vec![
            CapTerm { coefficient: c1, multipliers: alloc::vec![Scalar::i()] },
            CapTerm { coefficient: c2, multipliers: alloc::vec![-Scalar::i()] },
        ],
    }
}

/// Expansion of a grated cross cap over `m` bunches: 2^m terms with
/// per-bunch twists from {i, -i}, coefficients obtained by solving the
/// character-basis linear system against the crossing sign exactly. Fails
/// (rather than guessing) if the chosen constituent family cannot express
/// the target.
pub fn grated_cross_cap_expansion(m: usize, bunch_sizes: &[usize]) -> Result<CapExpansion> {
    if m == 0 || m > 4 || bunch_sizes.len() != m {
        return Err(Error::Malformed("grated cross cap wants 1..=4 sized bunches".into()));
    }
    // Twist vectors theta in {i,-i}^m, indexed by sign masks.
    let twists: Vec<Vec<Scalar>> = (0..1usize << m)
        .map(|mask| {
            (0..m)
                .map(|i| if (mask >> i) & 1 == 0 { Scalar::i() } else { -Scalar::i() })
                .collect()
        })
        .collect();
    // Equations over representative Hamming-weight vectors h, one per
    // residue pattern: sum_theta c_theta prod_i w_{theta,i}^{h_i} =
    // (-1)^{C(h,2)} with h = sum h_i.
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    let reps: Vec<Vec<u64>> = {
        let mut acc = alloc::vec![Vec::new()];
        for &d in bunch_sizes {
            let mut next = Vec::new();
            for partial in &acc {
                for h in 0..=(d.min(3) as u64) {
                    let mut p = partial.clone();
                    p.push(h);
                    next.push(p);
                }
            }
            acc = next;
        }
        acc
    };
    for h in &reps {
        let total: u64 = h.iter().sum();
        let sign = if (total * total.saturating_sub(1) / 2) % 2 == 0 {
            Scalar::one()
        } else {
            -Scalar::one()
        };
        let row = twists
            .iter()
            .map(|t| {
                let mut p = Scalar::one();
                for (i, hi) in h.iter().enumerate() {
                    p = &p * &t[i].pow(*hi);
                }
                p
            })
            .collect();
        rows.push(row);
        rhs.push(sign);
    }
    let coeffs = solve_linear_system(&rows, &rhs).ok_or_else(|| {
        Error::InvariantViolation(
            "no coefficient vector over the {i,-i} per-bunch family".into(),
        )
    })?;
    Ok(CapExpansion {
        terms: coeffs
            .into_iter()
            .zip(twists)
            .map(|(coefficient, multipliers)| CapTerm { coefficient, multipliers })
            .collect(),
    })
}

/// Crossing pattern of flattened caps. For a handle, strand s of bunch a
/// crosses strand t of bunch b once, ordered t = 1.. along a and s = last..
/// along b. For a cross cap, strands cross pairwise, ordered by partner
/// index along each strand.
struct StrandPlan {
    /// Per strand: the crossing ids it passes, in travel order, and
    /// whether the strand takes the (1,3) port pair there.
    path: Vec<Vec<(usize, bool)>>,
    crossing_count: usize,
}

fn handle_plan(da: usize, db: usize) -> StrandPlan {
    // Crossing (s, t) has id s*db + t.
    let mut path = Vec::new();
    for s in 0..da {
        path.push((0..db).map(|t| (s * db + t, true)).collect());
    }
    for t in 0..db {
        path.push((0..da).rev().map(|s| (s * db + t, false)).collect());
    }
    StrandPlan { path, crossing_count: da * db }
}

fn crosscap_plan(m: usize) -> StrandPlan {
    // Crossing of strands j < j' has a dense id; strand j passes partners
    // in increasing order and takes the (1,3) pair against larger ones.
    let mut id = alloc::vec![alloc::vec![usize::MAX; m]; m];
    let mut c = 0;
    for j in 0..m {
        for jp in j + 1..m {
            id[j][jp] = c;
            id[jp][j] = c;
            c += 1;
        }
    }
    let path = (0..m)
        .map(|j| {
            (0..m)
                .filter(|&p| p != j)
                .map(|p| (id[j][p], j < p))
                .collect()
        })
        .collect();
    StrandPlan { path, crossing_count: c }
}

/// Builder for cap regions shared by the gate constructors and the genus
/// pipeline: threads strands through fresh PASS crossing vertices.
struct CapThreader {
    sigs: Vec<Signature>,
    edges: Vec<SEdge>,
    incidence: Vec<Vec<usize>>,
    rotations: Vec<Option<Vec<Dart>>>,
}

impl CapThreader {
    fn from_graph(g: &SignatureGraph) -> Self {
        CapThreader {
            sigs: g.sigs.clone(),
            edges: g.edges.clone(),
            incidence: g.incidence.clone(),
            rotations: g
                .rotations
                .as_ref()
                .map(|r| r.0.clone())
                .unwrap_or_else(|| alloc::vec![None; g.sigs.len()]),
        }
    }

    fn add_crossings(&mut self, count: usize) -> usize {
        let base = self.sigs.len();
        for _ in 0..count {
            self.sigs.push(Signature::pass());
            self.incidence.push(alloc::vec![usize::MAX; 4]);
            self.rotations.push(Some(alloc::vec![(usize::MAX, 0); 4]));
        }
        base
    }

    /// Creates the edge between two strand ends, fixing incidence and
    /// rotation slots. Crossing ports: incidence positions 1/3 carry the
    /// first-pair strand, 2/4 the second (1-based); rotations are
    /// (in_first, in_second, out_first, out_second) counterclockwise in
    /// the cap frame.
    fn connect(&mut self, a: StrandEnd, b: StrandEnd, weight: Scalar) -> usize {
        let eid = self.edges.len();
        let va = a.vertex();
        let vb = b.vertex();
        match (va, vb) {
            (Some(u), Some(v)) => {
                self.edges.push(SEdge { ends: EdgeEnds::Internal(u, v), weight });
            }
            (Some(u), None) | (None, Some(u)) => {
                self.edges.push(SEdge { ends: EdgeEnds::Dangling(u), weight });
            }
            (None, None) => unreachable!("strand with two port ends is threaded via a relay"),
        }
        self.attach(&a, eid, 0);
        self.attach(&b, eid, u8::from(va.is_some() && vb.is_some()));
        eid
    }

    fn attach(&mut self, e: &StrandEnd, eid: usize, end: u8) {
        match *e {
            StrandEnd::Port => {}
            StrandEnd::Relay { v, slot } => {
                self.incidence[v][slot] = eid;
                if let Some(list) = self.rotations[v].as_mut() {
                    list[slot] = (eid, end);
                }
            }
            StrandEnd::CrossingIn(x, first_pair) => {
                let pos = if first_pair { 0 } else { 1 };
                self.incidence[x][pos] = eid;
                self.rotations[x].as_mut().expect("crossing embedded")[pos] = (eid, end);
            }
            StrandEnd::CrossingOut(x, first_pair) => {
                let pos = if first_pair { 2 } else { 3 };
                self.incidence[x][pos] = eid;
                self.rotations[x].as_mut().expect("crossing embedded")[pos] = (eid, end);
            }
        }
    }
}

/// One end of a strand being threaded.
#[derive(Clone, Copy)]
enum StrandEnd {
    /// A degree-2 relay vertex (crossing-free gate strands).
    Relay { v: usize, slot: usize },
    /// A crossing entry/exit, with the port-pair flag.
    CrossingIn(usize, bool),
    CrossingOut(usize, bool),
    /// A dangling gate port.
    Port,
}

impl StrandEnd {
    fn vertex(&self) -> Option<usize> {
        match *self {
            StrandEnd::Relay { v, .. } => Some(v),
            StrandEnd::CrossingIn(x, _) | StrandEnd::CrossingOut(x, _) => Some(x),
            StrandEnd::Port => None,
        }
    }
}

/// The crossing signature of PASS at crossings: incidence position pairs
/// (1,3) and (2,4) carry the two strands. Crossing rotations
/// (in_a, in_b, out_a, out_b) are counterclockwise in the cap frame.
///
/// Builds the grid cap gate over bunch sizes (d1, d2) with dangling order
/// x1, x2, y1, y2 where the y blocks follow the boundary (reverse strand
/// order).
pub fn build_grid_cap_gate(d1: usize, d2: usize) -> Result<Gate> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::Malformed("grid cap bunches must be nonempty".into()));
    }
    build_cap_gate(&[d1, d2], &handle_plan(d1, d2), true)
}

/// The cross cap gate over one bunch of size m, danglings x then y in the
/// same strand order.
pub fn build_cross_cap_gate(m: usize) -> Result<Gate> {
    if m == 0 {
        return Err(Error::Malformed("cross cap bunch must be nonempty".into()));
    }
    build_cap_gate(&[m], &crosscap_plan(m), false)
}

/// The grated cross cap gate: all strands of all bunches pass through one
/// cross cap (every pair crosses once); danglings are the concatenated x
/// blocks then the concatenated y blocks in the same order.
pub fn build_grated_cross_cap_gate(bunch_sizes: &[usize]) -> Result<Gate> {
    let m: usize = bunch_sizes.iter().sum();
    if m == 0 {
        return Err(Error::Malformed("grated cross cap needs strands".into()));
    }
    build_cap_gate(&[m], &crosscap_plan(m), false)
}

fn build_cap_gate(bunch_sizes: &[usize], plan: &StrandPlan, reverse_y: bool) -> Result<Gate> {
    let total: usize = bunch_sizes.iter().sum();
    let empty = SignatureGraph::new(Vec::new(), Vec::new(), Vec::new(), None)?;
    let mut th = CapThreader::from_graph(&empty);
    th.add_crossings(plan.crossing_count);
    // Strands with no crossing get a degree-2 relay so both ports exist.
    let mut strand_edges: Vec<(usize, usize)> = Vec::new(); // (exit eid, entry eid)
    for s in 0..total {
        let crossings = &plan.path[s];
        if crossings.is_empty() {
            // A two-vertex relay keeps wire semantics: the middle edge is
            // active exactly when the ports are not.
            let a = th.sigs.len();
            for _ in 0..2 {
                th.sigs.push(Signature::hw1(2));
                th.incidence.push(alloc::vec![usize::MAX; 2]);
                th.rotations.push(Some(alloc::vec![(usize::MAX, 0); 2]));
            }
            let b = a + 1;
            let e_in = th.connect(
                StrandEnd::Port,
                StrandEnd::Relay { v: a, slot: 0 },
                Scalar::one(),
            );
            th.connect(
                StrandEnd::Relay { v: a, slot: 1 },
                StrandEnd::Relay { v: b, slot: 0 },
                Scalar::one(),
            );
            let e_out = th.connect(
                StrandEnd::Relay { v: b, slot: 1 },
                StrandEnd::Port,
                Scalar::one(),
            );
            strand_edges.push((e_in, e_out));
            continue;
        }
        // Exit port edge into the first crossing.
        let first = crossings[0];
        let e_in = th.connect(
            StrandEnd::Port,
            StrandEnd::CrossingIn(first.0, first.1),
            Scalar::one(),
        );
        let mut prev = StrandEnd::CrossingOut(first.0, first.1);
        for &(x, fp) in &crossings[1..] {
            th.connect(prev, StrandEnd::CrossingIn(x, fp), Scalar::one());
            prev = StrandEnd::CrossingOut(x, fp);
        }
        let e_out = th.connect(prev, StrandEnd::Port, Scalar::one());
        strand_edges.push((e_in, e_out));
    }
    // Dangling order: x blocks in strand order, then y blocks following
    // the boundary (entries reversed for handles, same order for caps).
    let mut dangling = Vec::with_capacity(2 * total);
    for &(e_in, _) in &strand_edges {
        dangling.push(e_in);
    }
    let mut offset = 0;
    for &d in bunch_sizes {
        let block: Vec<usize> = (offset..offset + d).map(|s| strand_edges[s].1).collect();
        if reverse_y {
            dangling.extend(block.into_iter().rev());
        } else {
            dangling.extend(block);
        }
        offset += d;
    }
    let graph =
        SignatureGraph::new(th.sigs, th.edges, th.incidence, Some(Rotations(th.rotations)))?;
    Gate::new(graph, dangling)
}

/// Pointwise twist of a cap-gate table: entry x is scaled by
/// prod_i multipliers[i]^{hw of bunch block i in the x half}. This is the
/// table of the same gate with the exit segment of every bunch-i strand
/// scaled by multipliers[i].
pub fn twisted_table(
    table: &[Scalar],
    bunch_sizes: &[usize],
    multipliers: &[Scalar],
) -> Vec<Scalar> {
    let total: usize = bunch_sizes.iter().sum();
    let arity = 2 * total;
    assert_eq!(table.len(), 1 << arity);
    (0..table.len())
        .map(|idx| {
            let bits = crate::bits::bits_of(idx, arity);
            let mut factor = Scalar::one();
            let mut off = 0;
            for (bi, &d) in bunch_sizes.iter().enumerate() {
                let hw = bits[off..off + d].iter().filter(|&&b| b).count();
                factor = &factor * &multipliers[bi].pow(hw as u64);
                off += d;
            }
            &table[idx] * &factor
        })
        .collect()
}

/// Evaluates PerfMatch of a plane model: expands every handle into 4 and
/// every cross cap into 2 twisted planar constituents, runs FKT on each,
/// and combines exactly. The result of a real-weighted model is always
/// real; a nonzero imaginary part is an invariant violation.
pub fn genus_perfmatch(pm: &PlaneModel) -> Result<(Scalar, usize)> {
    pm.validate()?;
    let handle_exp = grid_cap_expansion();
    let cross_exp = cross_cap_expansion();
    let mut choice = alloc::vec![0usize; pm.handles.len() + pm.crosscaps.len()];
    let mut acc = Scalar::zero();
    let mut count = 0usize;
    loop {
        // Build this constituent.
        let mut coeff = Scalar::one();
        let mut twists: Vec<Vec<Scalar>> = Vec::new();
        for ci in 0..pm.handles.len() {
            let term = &handle_exp.terms[choice[ci]];
            coeff = &coeff * &term.coefficient;
            twists.push(term.multipliers.clone());
        }
        for (ci, _) in pm.crosscaps.iter().enumerate() {
            let term = &cross_exp.terms[choice[pm.handles.len() + ci]];
            coeff = &coeff * &term.coefficient;
            twists.push(term.multipliers.clone());
        }
        let constituent = expand_constituent(pm, &twists)?;
        let value = perfmatch_fkt(&constituent)?;
        acc += &(&coeff * &value);
        count += 1;
        // Advance the mixed-radix choice vector.
        let mut i = 0;
        loop {
            if i == choice.len() {
                if !acc.is_real() {
                    return Err(Error::InvariantViolation(alloc::format!(
                        "genus expansion produced a non-real value {acc}"
                    )));
                }
                if count != pm.constituent_count() {
                    return Err(Error::InvariantViolation("constituent count mismatch".into()));
                }
                return Ok((acc, count));
            }
            let radix = if i < pm.handles.len() { 4 } else { 2 };
            choice[i] += 1;
            if choice[i] < radix {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Builds one planar constituent of the plane model: bunch edges replaced
/// by strand wires through PASS crossings (then flattened through the PASS
/// matchgate), exit segments scaled by the cap twists.
fn expand_constituent(pm: &PlaneModel, twists: &[Vec<Scalar>]) -> Result<EmbeddedGraph> {
    // Signature-graph view of the interior with HW=1 everywhere.
    let g = &pm.graph;
    let mut sigs = Vec::with_capacity(g.n);
    let mut incidence: Vec<Vec<usize>> = alloc::vec![Vec::new(); g.n];
    for (eid, e) in g.edges.iter().enumerate() {
        incidence[e.u].push(eid);
        if e.v != e.u {
            incidence[e.v].push(eid);
        } else {
            incidence[e.u].push(eid);
        }
    }
    for v in 0..g.n {
        sigs.push(Signature::hw1(incidence[v].len()));
    }
    let edges: Vec<SEdge> = g
        .edges
        .iter()
        .map(|e| SEdge { ends: EdgeEnds::Internal(e.u, e.v), weight: e.weight.clone() })
        .collect();
    let base = SignatureGraph::new(sigs, edges, incidence, Some(pm.rotations.clone()))?;
    let mut th = CapThreader::from_graph(&base);

    // Thread the caps.
    let mut cap_index = 0usize;
    for h in &pm.handles {
        let plan = handle_plan(h.bunch_a.len(), h.bunch_b.len());
        let xbase = th.add_crossings(plan.crossing_count);
        let all: Vec<&BunchEdge> = h.bunch_a.iter().chain(&h.bunch_b).collect();
        for (s, be) in all.iter().enumerate() {
            let bunch_of_s = usize::from(s >= h.bunch_a.len());
            let mult = &twists[cap_index][bunch_of_s];
            thread_model_strand(&mut th, g, be, &plan.path[s], xbase, mult)?;
        }
        cap_index += 1;
    }
    for c in &pm.crosscaps {
        let plan = crosscap_plan(c.bunch.len());
        let xbase = th.add_crossings(plan.crossing_count);
        for (s, be) in c.bunch.iter().enumerate() {
            let mult = &twists[cap_index][0];
            thread_model_strand(&mut th, g, be, &plan.path[s], xbase, mult)?;
        }
        cap_index += 1;
    }

    let graph =
        SignatureGraph::new(th.sigs, th.edges, th.incidence, Some(Rotations(th.rotations)))?;
    flatten_pass_and_embed(graph)
}

/// Replaces one bunch edge by its strand wire. The original edge keeps its
/// id and becomes the first segment (exit side), scaled by the twist; the
/// entry vertex's dart is re-pointed to the last segment.
fn thread_model_strand(
    th: &mut CapThreader,
    g: &WeightedGraph,
    be: &BunchEdge,
    crossings: &[(usize, bool)],
    xbase: usize,
    mult: &Scalar,
) -> Result<usize> {
    let e = &g.edges[be.edge];
    let (exit_v, entry_v) = if be.exit_end == 0 { (e.u, e.v) } else { (e.v, e.u) };
    let weight = &e.weight * mult;
    if crossings.is_empty() {
        th.edges[be.edge].weight = weight;
        return Ok(be.edge);
    }
    // Locate both endpoint darts before any rewriting (self-loops have
    // both at the same vertex, distinguished by the end index).
    let entry = locate_dart(th, entry_v, be.edge, 1 - be.exit_end)?;
    let exit_rot_slot = th.rotations[exit_v]
        .as_ref()
        .and_then(|list| list.iter().position(|&d| d == (be.edge, be.exit_end)))
        .ok_or_else(|| Error::Malformed("bunch edge missing from rotations".into()))?;
    // First segment: reuse the original edge id, now exit_v -> crossing.
    let (x0, fp0) = (crossings[0].0 + xbase, crossings[0].1);
    th.edges[be.edge] = SEdge { ends: EdgeEnds::Internal(exit_v, x0), weight };
    let in_pos = if fp0 { 0 } else { 1 };
    th.incidence[x0][in_pos] = be.edge;
    if let Some(list) = th.rotations[x0].as_mut() {
        list[in_pos] = (be.edge, 1);
    }
    if let Some(list) = th.rotations[exit_v].as_mut() {
        list[exit_rot_slot] = (be.edge, 0);
    }
    let mut prev = StrandEnd::CrossingOut(x0, fp0);
    for &(x, fp) in &crossings[1..] {
        th.connect(prev, StrandEnd::CrossingIn(x + xbase, fp), Scalar::one());
        prev = StrandEnd::CrossingOut(x + xbase, fp);
    }
    // Last segment into the entry vertex, taking over the old dart slots.
    let (slot, rot_slot) = entry;
    let last = th.edges.len();
    let StrandEnd::CrossingOut(xp, fpp) = prev else { unreachable!() };
    th.edges.push(SEdge { ends: EdgeEnds::Internal(xp, entry_v), weight: Scalar::one() });
    let out_pos = if fpp { 2 } else { 3 };
    th.incidence[xp][out_pos] = last;
    if let Some(list) = th.rotations[xp].as_mut() {
        list[out_pos] = (last, 0);
    }
    th.incidence[entry_v][slot] = last;
    if let Some(list) = th.rotations[entry_v].as_mut() {
        list[rot_slot] = (last, 1);
    }
    Ok(last)
}

/// Incidence and rotation slots of a dart at a vertex.
fn locate_dart(th: &CapThreader, v: usize, eid: usize, end: u8) -> Result<(usize, usize)> {
    let slot = th.incidence[v]
        .iter()
        .position(|&e| e == eid)
        .ok_or_else(|| Error::Malformed("bunch edge missing from incidence".into()))?;
    let rot_slot = th.rotations[v]
        .as_ref()
        .and_then(|list| list.iter().position(|&d| d == (eid, end)))
        .ok_or_else(|| Error::Malformed("bunch edge missing from rotations".into()))?;
    Ok((slot, rot_slot))
}

/// Flattens all PASS vertices through the PASS matchgate and extracts the
/// embedded weighted graph.
fn flatten_pass_and_embed(mut graph: SignatureGraph) -> Result<EmbeddedGraph> {
    let pass = crate::matchgates::build_pass_matchgate();
    loop {
        let Some(v) = graph
            .sigs
            .iter()
            .position(|s| matches!(s, Signature::Builtin { kind: Builtin::Pass, .. }))
        else {
            break;
        };
        graph = insert_gate(&graph, v, &pass.gate)?.graph;
    }
    let (g, rot) = graph.to_weighted()?;
    let rot = rot.ok_or_else(|| Error::Malformed("constituent lost its embedding".into()))?;
    EmbeddedGraph::new(g, rot)
}

pub mod fixtures;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{bits_of, hw, index_of};
    use crate::gate::gate_signature;
    use crate::sig_graph::EvalBudget;

    /// Defining table of the grid cap crossing gate: sign (-1)^{px1*px2}
    /// on matched reversals.
    fn grid_cap_reference(d1: usize, d2: usize, bits: &[bool]) -> Scalar {
        let (x1, rest) = bits.split_at(d1);
        let (x2, rest) = rest.split_at(d2);
        let (y1, y2) = rest.split_at(d1);
        let r1: Vec<bool> = x1.iter().rev().copied().collect();
        let r2: Vec<bool> = x2.iter().rev().copied().collect();
        if y1 != &r1[..] || y2 != &r2[..] {
            return Scalar::zero();
        }
        if hw(x1) % 2 == 1 && hw(x2) % 2 == 1 {
            -Scalar::one()
        } else {
            Scalar::one()
        }
    }

    #[test]
    fn grid_cap_gate_matches_definition() {
        for (d1, d2) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            let gate = build_grid_cap_gate(d1, d2).unwrap();
            gate.check_witness().unwrap();
            let table = gate_signature(&gate, &EvalBudget::default()).unwrap().to_table();
            let arity = 2 * (d1 + d2);
            for idx in 0..1usize << arity {
                let bits = bits_of(idx, arity);
                assert_eq!(
                    table[idx],
                    grid_cap_reference(d1, d2, &bits),
                    "d1={d1} d2={d2} idx={idx:0w$b}",
                    w = arity
                );
            }
        }
    }

    #[test]
    fn single_crossing_is_pass_shaped() {
        let gate = build_grid_cap_gate(1, 1).unwrap();
        let table = gate_signature(&gate, &EvalBudget::default()).unwrap().to_table();
        assert_eq!(table[index_of(&[true, true, true, true])], -Scalar::one());
        assert_eq!(table[index_of(&[true, false, true, false])], Scalar::one());
        assert_eq!(table[index_of(&[false, false, false, false])], Scalar::one());
    }

    #[test]
    fn grid_cap_expansion_contracts_to_target() {
        let exp = grid_cap_expansion();
        let coeffs: Vec<Scalar> = exp.terms.iter().map(|t| t.coefficient.clone()).collect();
        assert_eq!(
            coeffs,
            alloc::vec![
                Scalar::ratio(1, 2),
                Scalar::ratio(1, 2),
                Scalar::ratio(1, 2),
                Scalar::ratio(-1, 2)
            ]
        );
        for (d1, d2) in [(1, 1), (2, 1), (2, 2)] {
            let gate = build_grid_cap_gate(d1, d2).unwrap();
            let base = gate_signature(&gate, &EvalBudget::default()).unwrap().to_table();
            let arity = 2 * (d1 + d2);
            let mut sum = alloc::vec![Scalar::zero(); 1 << arity];
            for term in &exp.terms {
                let twisted = twisted_table(&base, &[d1, d2], &term.multipliers);
                for (i, v) in twisted.into_iter().enumerate() {
                    sum[i] = &sum[i] + &(&term.coefficient * &v);
                }
            }
            // Target: the untwisted reversal indicator, no sign.
            for (idx, got) in sum.iter().enumerate() {
                let bits = bits_of(idx, arity);
                let reference = grid_cap_reference(d1, d2, &bits);
                let want = if reference.is_zero() {
                    Scalar::zero()
                } else {
                    Scalar::one()
                };
                assert_eq!(*got, want, "d1={d1} d2={d2} idx={idx}");
            }
        }
    }

    #[test]
    fn cross_cap_gate_matches_definition() {
        for m in [1, 2, 3] {
            let gate = build_cross_cap_gate(m).unwrap();
            gate.check_witness().unwrap();
            let table = gate_signature(&gate, &EvalBudget::default()).unwrap().to_table();
            for idx in 0..1usize << (2 * m) {
                let bits = bits_of(idx, 2 * m);
                let (x, y) = bits.split_at(m);
                let want = if x != y {
                    Scalar::zero()
                } else if (hw(x) * hw(x).saturating_sub(1) / 2) % 2 == 1 {
                    -Scalar::one()
                } else {
                    Scalar::one()
                };
                assert_eq!(table[idx], want, "m={m} idx={idx}");
            }
        }
    }

    #[test]
    fn cross_cap_expansion_contracts_to_identity() {
        let exp = cross_cap_expansion();
        for m in [1, 2, 3] {
            let gate = build_cross_cap_gate(m).unwrap();
            let base = gate_signature(&gate, &EvalBudget::default()).unwrap().to_table();
            let mut sum = alloc::vec![Scalar::zero(); 1 << (2 * m)];
            for term in &exp.terms {
                let twisted = twisted_table(&base, &[m], &term.multipliers);
                for (i, v) in twisted.into_iter().enumerate() {
                    sum[i] = &sum[i] + &(&term.coefficient * &v);
                }
            }
            for (idx, got) in sum.iter().enumerate() {
                let bits = bits_of(idx, 2 * m);
                let (x, y) = bits.split_at(m);
                let want = if x == y { Scalar::one() } else { Scalar::zero() };
                assert_eq!(*got, want, "m={m} idx={idx}");
            }
        }
    }

    #[test]
    fn cross_cap_coefficient_values() {
        // hw = 0: the coefficients sum to 1; hw = 2: both twists give -1.
        let exp = cross_cap_expansion();
        let total = &exp.terms[0].coefficient + &exp.terms[1].coefficient;
        assert_eq!(total, Scalar::one());
    }

    #[test]
    fn grated_cross_cap_reduces_to_cross_cap_at_one_bunch() {
        let grated = grated_cross_cap_expansion(1, &[2]).unwrap();
        let plain = cross_cap_expansion();
        assert_eq!(grated.terms.len(), 2);
        for (g, p) in grated.terms.iter().zip(&plain.terms) {
            assert_eq!(g.coefficient, p.coefficient);
            assert_eq!(g.multipliers, p.multipliers);
        }
    }

    #[test]
    fn grated_cross_cap_contracts() {
        for sizes in [&[1usize, 1][..], &[2, 1], &[2, 2], &[1, 1, 1]] {
            let m = sizes.len();
            let exp = grated_cross_cap_expansion(m, sizes).unwrap();
            assert_eq!(exp.terms.len(), 1 << m);
            let gate = build_grated_cross_cap_gate(sizes).unwrap();
            let total: usize = sizes.iter().sum();
            let base = gate_signature(&gate, &EvalBudget::default()).unwrap().to_table();
            let mut sum = alloc::vec![Scalar::zero(); 1 << (2 * total)];
            for term in &exp.terms {
                if term.coefficient.is_zero() {
                    continue;
                }
                // Per-bunch multipliers act on the per-bunch x blocks.
                let strand_mults: Vec<Scalar> = sizes
                    .iter()
                    .zip(&term.multipliers)
                    .flat_map(|(&d, mult)| core::iter::repeat(mult.clone()).take(d))
                    .collect();
                let per_strand_sizes = alloc::vec![1usize; total];
                let twisted = twisted_table(&base, &per_strand_sizes, &strand_mults);
                for (i, v) in twisted.into_iter().enumerate() {
                    sum[i] = &sum[i] + &(&term.coefficient * &v);
                }
            }
            for (idx, got) in sum.iter().enumerate() {
                let bits = bits_of(idx, 2 * total);
                let (x, y) = bits.split_at(total);
                let want = if x == y { Scalar::one() } else { Scalar::zero() };
                assert_eq!(*got, want, "sizes={sizes:?} idx={idx}");
            }
        }
    }
}
