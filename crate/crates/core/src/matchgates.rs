//! The concrete matchgates: a planar crossing matchgate for PASS, the
//! composite gates for PRE and ACT (with the even filter), and the dummy
//! gate used by the lifted cell gate. Each ships fully flattened (all
//! vertices HW=1) together with its target signature; `verify_matchgate`
//! is the acceptance authority for all of them.

use alloc::vec::Vec;

use crate::bits::bits_of;
use crate::embedding::Rotations;
use crate::error::Result;
use crate::gate::{gate_signature, insert_gate, Gate};
use crate::scalar::Scalar;
use crate::sig_graph::{EvalBudget, SigGraphBuilder, SignatureGraph};
use crate::signature::Signature;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MatchgateName {
    GammaPass,
    GammaPre,
    GammaAct,
    Dummy,
}

/// A shipped matchgate: a fully flattened gate (every vertex HW=1), the
/// signature it must realize, and the dangling labels reserved for apex
/// wiring (excluded from the planar witness).
#[derive(Clone, Debug)]
pub struct NamedMatchgate {
    pub name: MatchgateName,
    pub gate: Gate,
    pub target: Signature,
    pub apex_dangling: Vec<usize>,
}

/// The planar matchgate for PASS: a hexagon with the antipodal chord of
/// weight -1, ports at alternating outer vertices. Dangling edges 1..4
/// (N, E, S, W) appear clockwise on the outer face.
pub fn build_pass_matchgate() -> NamedMatchgate {
    let mut b = SigGraphBuilder::new();
    let v: Vec<usize> = (0..6).map(|_| b.add_vertex(Signature::hw1(3))).collect();
    let e01 = b.add_edge(v[0], v[1], Scalar::one());
    let e12 = b.add_edge(v[1], v[2], Scalar::one());
    let e23 = b.add_edge(v[2], v[3], Scalar::one());
    let e34 = b.add_edge(v[3], v[4], Scalar::one());
    let e45 = b.add_edge(v[4], v[5], Scalar::one());
    let e50 = b.add_edge(v[5], v[0], Scalar::one());
    let chord = b.add_edge(v[0], v[3], -Scalar::one());
    let dn = b.add_dangling(v[1]);
    let de = b.add_dangling(v[2]);
    let ds = b.add_dangling(v[4]);
    let dw = b.add_dangling(v[5]);
    // Hexagon drawn clockwise 0..5 with vertex 0 on top; rotations are
    // counterclockwise per vertex.
    let rot = Rotations::full(alloc::vec![
        alloc::vec![(e50, 1), (chord, 0), (e01, 0)],
        alloc::vec![(dn, 0), (e01, 1), (e12, 0)],
        alloc::vec![(e12, 1), (e23, 0), (de, 0)],
        alloc::vec![(e23, 1), (chord, 1), (e34, 0)],
        alloc::vec![(e45, 0), (ds, 0), (e34, 1)],
        alloc::vec![(e50, 0), (dw, 0), (e45, 1)],
    ]);
    let mut graph = b.finish(None).expect("consistent construction");
    graph.rotations = Some(rot);
    let gate = Gate::new(graph, alloc::vec![dn, de, ds, dw]).expect("valid gate");
    NamedMatchgate {
        name: MatchgateName::GammaPass,
        gate,
        target: Signature::pass(),
        apex_dangling: Vec::new(),
    }
}

/// The PRE gate before flattening: a PASS crossing core with a tap gadget
/// on each vertical side. A tap is two HW=1 vertices u - t; the outer
/// vertex u carries the external port, the inner vertex t carries the
/// internal continuation and the apex port. Activating the apex port
/// forces the external edge active and blocks the internal one.
fn pre_abstract_gate() -> Gate {
    let mut b = SigGraphBuilder::new();
    let u_n = b.add_vertex(Signature::hw1(2));
    let t_n = b.add_vertex(Signature::hw1(3));
    let p = b.add_vertex(Signature::pass());
    let t_s = b.add_vertex(Signature::hw1(3));
    let u_s = b.add_vertex(Signature::hw1(2));

    // Port order at the PASS core is (N, E, S, W).
    let d1 = b.add_dangling(u_n); // N
    let e_un_tn = b.add_edge(u_n, t_n, Scalar::one());
    let e_tn_p = b.add_edge(t_n, p, Scalar::one()); // PASS position 1 (N)
    let d2 = b.add_dangling(p); // E, PASS position 2
    let e_p_ts = b.add_edge(p, t_s, Scalar::one()); // PASS position 3 (S)
    let d4 = b.add_dangling(p); // W, PASS position 4
    let e_ts_us = b.add_edge(t_s, u_s, Scalar::one());
    let d3 = b.add_dangling(u_s); // S
    let d5 = b.add_dangling(t_s); // apex port 5
    let d6 = b.add_dangling(t_n); // apex port 6

    let mut graph = b.finish(None).expect("consistent construction");
    // PASS incidence must read (N, E, S, W); the builder recorded
    // (e_tn_p, d2, e_p_ts, d4) at p, which is exactly that.
    debug_assert_eq!(graph.incidence[p], alloc::vec![e_tn_p, d2, e_p_ts, d4]);
    // Vertical line drawn top to bottom; apex ports are omitted from the
    // witness (they leave the plane).
    graph.rotations = Some(Rotations::full(alloc::vec![
        alloc::vec![(d1, 0), (e_un_tn, 0)],
        alloc::vec![(e_un_tn, 1), (e_tn_p, 0)],
        alloc::vec![(d2, 0), (e_tn_p, 1), (d4, 0), (e_p_ts, 0)],
        alloc::vec![(e_p_ts, 1), (e_ts_us, 0)],
        alloc::vec![(e_ts_us, 1), (d3, 0)],
    ]));
    Gate::new(graph, alloc::vec![d1, d2, d3, d4, d5, d6]).expect("valid gate")
}

/// The planar matchgate for PRE (after removal of dangling edges 5 and 6):
/// the abstract gate with the PASS core flattened.
pub fn build_pre_matchgate() -> NamedMatchgate {
    let abstract_gate = pre_abstract_gate();
    let pass = build_pass_matchgate();
    let p = 2; // PASS core vertex id in pre_abstract_gate
    let ins = insert_gate(&abstract_gate.graph, p, &pass.gate).expect("arity 4 match");
    let gate = Gate::new(ins.graph, abstract_gate.dangling.clone()).expect("ports survive");
    NamedMatchgate {
        name: MatchgateName::GammaPre,
        gate,
        target: Signature::pre(),
        apex_dangling: alloc::vec![5, 6],
    }
}

/// The ACT gate before flattening: a PRE center inside a ring of four PASS
/// vertices (the even filter) plus the forced edge of weight 1/2.
fn act_abstract_gate() -> Gate {
    let mut b = SigGraphBuilder::new();
    let g = b.add_vertex(Signature::pre());
    let r: Vec<usize> = (0..4).map(|_| b.add_vertex(Signature::pass())).collect();
    let h1 = b.add_vertex(Signature::hw1(1));
    let h2 = b.add_vertex(Signature::hw1(1));

    // Ring vertex ports are (outward dangling, ring-cw, inward, ring-ccw):
    // opposite pairs as PASS requires.
    let mut danglings = alloc::vec![0usize; 4];
    let mut inward = alloc::vec![0usize; 4];
    let mut ring = alloc::vec![0usize; 4]; // ring[i] joins r[i] and r[(i+1)%4]
    for i in 0..4 {
        danglings[i] = b.add_dangling(r[i]);
        ring[i] = b.add_edge(r[i], r[(i + 1) % 4], Scalar::one());
        inward[i] = b.add_edge(r[i], g, Scalar::one());
    }
    let d5 = b.add_dangling(g);
    let d6 = b.add_dangling(g);
    let half = b.add_edge(h1, h2, Scalar::ratio(1, 2));

    let mut graph = b.finish(None).expect("consistent construction");
    // Rebuild the incidence orders explicitly: r[i] must read
    // (dangling, ring[i], inward[i], ring[i-1]), and the PRE center reads
    // its inward edges as (N, E, S, W) before the apex ports.
    for i in 0..4 {
        graph.incidence[r[i]] =
            alloc::vec![danglings[i], ring[i], inward[i], ring[(i + 3) % 4]];
    }
    graph.incidence[g] =
        alloc::vec![inward[0], inward[1], inward[2], inward[3], d5, d6];
    graph.validate().expect("incidence rebuilt consistently");

    // Geometry: ring vertex 0 up, 1 right, 2 down, 3 left; the half-edge
    // component floats outside. Apex ports omitted from the witness.
    graph.rotations = Some(Rotations::full(alloc::vec![
        // g (center): CCW = E, N, W, S.
        alloc::vec![(inward[1], 1), (inward[0], 1), (inward[3], 1), (inward[2], 1)],
        // r0 (up): dangling @90, ring[3] @225, inward @270, ring[0] @315.
        alloc::vec![(danglings[0], 0), (ring[3], 1), (inward[0], 0), (ring[0], 0)],
        // r1 (right): dangling @0, ring[0] @135, inward @180, ring[1] @225.
        alloc::vec![(danglings[1], 0), (ring[0], 1), (inward[1], 0), (ring[1], 0)],
        // r2 (down): ring[1] @45, inward @90, ring[2] @135, dangling @270.
        alloc::vec![(ring[1], 1), (inward[2], 0), (ring[2], 0), (danglings[2], 0)],
        // r3 (left): inward @0, ring[3] @45, dangling @180, ring[2] @315.
        alloc::vec![(inward[3], 0), (ring[3], 0), (danglings[3], 0), (ring[2], 1)],
        alloc::vec![(half, 0)],
        alloc::vec![(half, 1)],
    ]));
    Gate::new(graph, alloc::vec![danglings[0], danglings[1], danglings[2], danglings[3], d5, d6])
        .expect("valid gate")
}

/// The matchgate for ACT: the even-filter gate flattened through the PRE
/// and PASS matchgates. Non-unit edge weights are exactly {-1, 1/2}.
pub fn build_act_gate() -> NamedMatchgate {
    let abstract_gate = act_abstract_gate();
    let ports = abstract_gate.dangling.clone();
    let pre = build_pre_matchgate();
    let pass = build_pass_matchgate();
    // Insert PRE at the center (vertex 0), then PASS at each ring vertex.
    // Host edge ids are stable under insertion, so the port list survives.
    let mut graph = insert_gate(&abstract_gate.graph, 0, &pre.gate).expect("pre fits").graph;
    for _ in 0..4 {
        let v = graph
            .sigs
            .iter()
            .position(|s| {
                matches!(
                    s,
                    Signature::Builtin { kind: crate::signature::Builtin::Pass, .. }
                )
            })
            .expect("ring vertex remaining");
        graph = insert_gate(&graph, v, &pass.gate).expect("pass fits").graph;
    }
    let gate = Gate::new(graph, ports).expect("ports survive");
    NamedMatchgate {
        name: MatchgateName::GammaAct,
        gate,
        target: Signature::act(),
        apex_dangling: alloc::vec![5, 6],
    }
}

/// The dummy gate: a PRE vertex whose west and east ports are forced
/// inactive by pendant 2-paths; exposes (N, S, 5, 6). The pendant vertex
/// forces its edge active, which in turn forces the port edge inactive.
fn dummy_abstract_gate() -> Gate {
    let mut b = SigGraphBuilder::new();
    let p = b.add_vertex(Signature::pre());
    let g1e = b.add_vertex(Signature::hw1(2));
    let g2e = b.add_vertex(Signature::hw1(1));
    let g1w = b.add_vertex(Signature::hw1(2));
    let g2w = b.add_vertex(Signature::hw1(1));

    let dn = b.add_dangling(p); // port 1 = N
    let p_e = b.add_edge(p, g1e, Scalar::one()); // port 2 = E, killed
    let ds = b.add_dangling(p); // port 3 = S
    let p_w = b.add_edge(p, g1w, Scalar::one()); // port 4 = W, killed
    let d5 = b.add_dangling(p);
    let d6 = b.add_dangling(p);
    let e_pend = b.add_edge(g1e, g2e, Scalar::one());
    let w_pend = b.add_edge(g1w, g2w, Scalar::one());

    let mut graph = b.finish(None).expect("consistent construction");
    graph.rotations = Some(Rotations::full(alloc::vec![
        alloc::vec![(p_e, 0), (dn, 0), (p_w, 0), (ds, 0)],
        alloc::vec![(p_e, 1), (e_pend, 0)],
        alloc::vec![(e_pend, 1)],
        alloc::vec![(p_w, 1), (w_pend, 0)],
        alloc::vec![(w_pend, 1)],
    ]));
    Gate::new(graph, alloc::vec![dn, ds, d5, d6]).expect("valid gate")
}

/// Expected dummy-gate signature on (N, S, 5, 6): PRE with dead horizontal
/// ports.
fn dummy_target() -> Signature {
    let pre = Signature::pre();
    let table: Vec<Scalar> = (0..16)
        .map(|idx| {
            let x = bits_of(idx, 4);
            let full = [x[0], false, x[1], false, x[2], x[3]];
            pre.eval(&full).expect("arity 6")
        })
        .collect();
    Signature::dense(4, table).expect("16 entries")
}

pub fn build_dummy_gate() -> NamedMatchgate {
    let abstract_gate = dummy_abstract_gate();
    let ports = abstract_gate.dangling.clone();
    let pre = build_pre_matchgate();
    let graph = insert_gate(&abstract_gate.graph, 0, &pre.gate).expect("pre fits").graph;
    let gate = Gate::new(graph, ports).expect("ports survive");
    NamedMatchgate {
        name: MatchgateName::Dummy,
        gate,
        target: dummy_target(),
        apex_dangling: alloc::vec![3, 4],
    }
}

/// One mismatch found by verification.
#[derive(Clone, Debug)]
pub struct Mismatch {
    pub input: usize,
    pub got: Scalar,
    pub want: Scalar,
}

/// Report of the exhaustive signature comparison.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub arity: usize,
    pub inputs: usize,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Exhaustively compares the gate signature against the target on all
/// 2^arity inputs. Mismatches are data, not errors.
pub fn verify_matchgate(m: &NamedMatchgate) -> Result<VerifyReport> {
    let sig = gate_signature(&m.gate, &EvalBudget::default())?;
    let got = sig.to_table();
    let want = m.target.to_table();
    let mismatches = got
        .into_iter()
        .zip(want)
        .enumerate()
        .filter(|(_, (g, w))| g != w)
        .map(|(input, (got, want))| Mismatch { input, got, want })
        .collect();
    Ok(VerifyReport { arity: m.target.arity(), inputs: 1 << m.target.arity(), mismatches })
}

/// True if every vertex carries HW=1, i.e. the gate is a genuine matchgate.
pub fn is_flattened_matchgate(g: &SignatureGraph) -> bool {
    use crate::signature::Builtin;
    g.sigs
        .iter()
        .all(|s| matches!(s, Signature::Builtin { kind: Builtin::HwEq1, .. }))
}
