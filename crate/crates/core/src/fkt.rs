//! The FKT method: Pfaffian orientations of embedded planar graphs, exact
//! PerfMatch via the Pfaffian, and the n^{|S|}-style apex evaluator that
//! matches apices by brute force and calls FKT on the planar rest.

use alloc::vec::Vec;

use crate::embedding::{
    euler_check, restrict, simplify_for_fkt, trace_faces, validate_rotations, Dart, EmbeddedGraph,
    Rotations,
};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::matching::{find_perfect_matching, perfmatch_bruteforce};
use crate::matrix::{pfaffian, Matrix};
use crate::scalar::Scalar;

/// An edge orientation: `true` orients edge `e` from `e.u` to `e.v`.
#[derive(Clone, Debug)]
pub struct Orientation(pub Vec<bool>);

/// Constructs a Pfaffian orientation of a connected embedded graph by the
/// spanning-tree / dual-tree method: after fixing tree edges arbitrarily,
/// every non-tree edge closes exactly one inner face, which is oriented to
/// make that face odd. Self-loops are not supported.
pub fn pfaffian_orientation(eg: &EmbeddedGraph) -> Result<Orientation> {
    let g = &eg.graph;
    validate_rotations(g, &eg.rotations)?;
    euler_check(g, &eg.rotations)?;
    if g.edges.iter().any(|e| e.u == e.v) {
        return Err(Error::Validation("self-loop in pfaffian_orientation".into()));
    }
    if g.components().len() > 1 {
        return Err(Error::Validation("pfaffian_orientation needs a connected graph".into()));
    }

    let m = g.edges.len();
    let mut dir = alloc::vec![true; m];
    if m == 0 {
        return Ok(Orientation(dir));
    }

    // BFS spanning tree.
    let adj = g.adjacency();
    let mut in_tree = alloc::vec![false; m];
    let mut seen = alloc::vec![false; g.n];
    let mut queue = alloc::vec![0usize];
    seen[0] = true;
    let mut qi = 0;
    while qi < queue.len() {
        let v = queue[qi];
        qi += 1;
        for &(eid, w) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                in_tree[eid] = true;
                queue.push(w);
            }
        }
    }

    // Faces; the largest one (lowest index on ties) is declared outer.
    let faces = trace_faces(g, &eg.rotations);
    let outer = faces
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .expect("at least one face");
    let mut face_of = alloc::vec![[usize::MAX; 2]; m];
    for (fid, walk) in faces.iter().enumerate() {
        for &(eid, end) in walk {
            face_of[eid][end as usize] = fid;
        }
    }

    // BFS over faces from the outer one along non-tree edges; each visited
    // face records the non-tree edge that discovered it.
    let mut parent_edge = alloc::vec![usize::MAX; faces.len()];
    let mut visited = alloc::vec![false; faces.len()];
    let mut order = Vec::new();
    visited[outer] = true;
    let mut fq = alloc::vec![outer];
    let mut fqi = 0;
    while fqi < fq.len() {
        let f = fq[fqi];
        fqi += 1;
        order.push(f);
        for &(eid, _) in &faces[f] {
            if in_tree[eid] {
                continue;
            }
            let [f0, f1] = face_of[eid];
            let g2 = if f0 == f { f1 } else { f0 };
            if !visited[g2] {
                visited[g2] = true;
                parent_edge[g2] = eid;
                fq.push(g2);
            }
        }
    }

    // Leaves first: when a face is processed, every boundary edge except
    // its parent edge is already fixed.
    for &f in order.iter().rev() {
        if f == outer {
            continue;
        }
        let pe = parent_edge[f];
        debug_assert_ne!(pe, usize::MAX, "dual tree spans all faces");
        let mut along = 0usize;
        let mut parent_dart: Option<Dart> = None;
        for &(eid, end) in &faces[f] {
            if eid == pe {
                parent_dart = Some((eid, end));
            } else if dir[eid] == (end == 0) {
                along += 1;
            }
        }
        let (pe, pend) = parent_dart.expect("parent edge on face boundary");
        // Make the face odd: the parent dart agrees iff `along` is even.
        dir[pe] = if along % 2 == 0 { pend == 0 } else { pend != 0 };
    }
    Ok(Orientation(dir))
}

/// Checks the defining invariant: every face except the designated outer
/// one has an odd number of edges oriented along its traversal.
pub fn orientation_faces_odd(eg: &EmbeddedGraph, o: &Orientation) -> bool {
    let faces = trace_faces(&eg.graph, &eg.rotations);
    let outer = faces
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .expect("at least one face");
    faces.iter().enumerate().all(|(fid, walk)| {
        fid == outer
            || walk
                .iter()
                .filter(|&&(eid, end)| o.0[eid] == (end == 0))
                .count()
                % 2
                == 1
    })
}

/// Sign of the Pfaffian term of one perfect matching under an orientation:
/// the permutation sign of the paired vertex sequence times the product of
/// per-edge direction signs.
fn matching_term_sign(g: &WeightedGraph, o: &Orientation, matching: &[usize]) -> i64 {
    let mut pairs: Vec<(usize, usize, bool)> = matching
        .iter()
        .map(|&eid| {
            let e = &g.edges[eid];
            let (a, b) = (e.u.min(e.v), e.u.max(e.v));
            // Direction sign: +1 iff oriented from a to b.
            let along = if e.u < e.v { o.0[eid] } else { !o.0[eid] };
            (a, b, along)
        })
        .collect();
    pairs.sort_unstable();
    let mut seq = Vec::with_capacity(2 * pairs.len());
    let mut sign = 1i64;
    for &(a, b, along) in &pairs {
        seq.push(a);
        seq.push(b);
        if !along {
            sign = -sign;
        }
    }
    // Inversion parity of the flattened sequence.
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn fkt_connected(g: &WeightedGraph, rot: &Rotations) -> Result<Scalar> {
    if g.n % 2 != 0 {
        return Ok(Scalar::zero());
    }
    if g.n == 0 {
        return Ok(Scalar::one());
    }
    let eg = EmbeddedGraph { graph: g.clone(), rotations: rot.clone() };
    let orient = pfaffian_orientation(&eg)?;
    // One reference matching fixes the global sign; with a Pfaffian
    // orientation all matching terms share it. Negative or Gaussian
    // weights make "take the nonnegative root" unsound, hence this path.
    let Some(m0) = find_perfect_matching(g) else {
        return Ok(Scalar::zero());
    };
    let sign = matching_term_sign(g, &orient, &m0);
    let mut a = Matrix::zeros(g.n, g.n);
    for (eid, e) in g.edges.iter().enumerate() {
        let w = if orient.0[eid] { e.weight.clone() } else { -&e.weight };
        let cur = a.get(e.u, e.v).clone();
        a.set(e.u, e.v, &cur + &w);
        let cur = a.get(e.v, e.u).clone();
        a.set(e.v, e.u, &cur - &w);
    }
    let pf = pfaffian(&a)?;
    Ok(if sign < 0 { -pf } else { pf })
}

/// Exact PerfMatch of an embedded planar graph via the FKT method.
/// Components are evaluated independently; parallel edges are subdivided
/// and self-loops dropped first.
pub fn perfmatch_fkt(eg: &EmbeddedGraph) -> Result<Scalar> {
    validate_rotations(&eg.graph, &eg.rotations)?;
    euler_check(&eg.graph, &eg.rotations)?;
    let (g, rot) = simplify_for_fkt(&eg.graph, &eg.rotations);
    let mut result = Scalar::one();
    for comp in g.components() {
        let mut keep = alloc::vec![false; g.n];
        for &v in &comp {
            keep[v] = true;
        }
        let (sub, subrot, _) = restrict(&g, &rot, &keep);
        let part = fkt_connected(&sub, &subrot)?;
        if part.is_zero() {
            return Ok(Scalar::zero());
        }
        result *= &part;
    }
    Ok(result)
}

/// PerfMatch of a graph with apex set `S`: the rotation table must cover
/// exactly the non-apex vertices (`None` on `S`). Sums over all ways to
/// match the apices (into the rest or among themselves), running FKT on
/// each residual planar graph.
pub fn perfmatch_apex(g: &WeightedGraph, apices: &[usize], rot: &Rotations) -> Result<Scalar> {
    let mut is_apex = alloc::vec![false; g.n];
    for &a in apices {
        if a >= g.n {
            return Err(Error::Malformed("apex out of range".into()));
        }
        is_apex[a] = true;
    }
    for v in 0..g.n {
        if is_apex[v] == rot.is_embedded(v) {
            return Err(Error::Malformed(
                "rotation domain must be exactly the non-apex vertices".into(),
            ));
        }
    }
    validate_rotations(g, rot)?;
    euler_check(g, rot)?;
    let apex_list: Vec<usize> = (0..g.n).filter(|&v| is_apex[v]).collect();
    let adj = g.adjacency();
    let mut matched = alloc::vec![false; g.n];
    let mut acc = Scalar::zero();
    match_apices(g, &adj, rot, &apex_list, 0, &mut matched, &Scalar::one(), &mut acc)?;
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn match_apices(
    g: &WeightedGraph,
    adj: &[Vec<(usize, usize)>],
    rot: &Rotations,
    apices: &[usize],
    i: usize,
    matched: &mut [bool],
    weight: &Scalar,
    acc: &mut Scalar,
) -> Result<()> {
    if i == apices.len() {
        // All apices matched; FKT on what is left of the embedded part.
        let keep: Vec<bool> = (0..g.n)
            .map(|v| rot.is_embedded(v) && !matched[v])
            .collect();
        let (sub, subrot, _) = restrict(g, rot, &keep);
        let rest = perfmatch_fkt(&EmbeddedGraph { graph: sub, rotations: subrot })?;
        if !rest.is_zero() {
            *acc += &(weight * &rest);
        }
        return Ok(());
    }
    let a = apices[i];
    if matched[a] {
        return match_apices(g, adj, rot, apices, i + 1, matched, weight, acc);
    }
    matched[a] = true;
    for &(eid, w) in &adj[a] {
        if w == a || matched[w] {
            continue;
        }
        let ew = &g.edges[eid].weight;
        if ew.is_zero() {
            continue;
        }
        matched[w] = true;
        let nw = weight * ew;
        match_apices(g, adj, rot, apices, i + 1, matched, &nw, acc)?;
        matched[w] = false;
    }
    matched[a] = false;
    Ok(())
}

/// Convenience wrapper asserting agreement with the brute-force oracle;
/// used in tests and the CLI's self-check paths.
pub fn perfmatch_fkt_checked(eg: &EmbeddedGraph) -> Result<Scalar> {
    let fast = perfmatch_fkt(eg)?;
    let slow = perfmatch_bruteforce(&eg.graph);
    if fast != slow {
        return Err(Error::InvariantViolation(alloc::format!(
            "FKT {fast} != brute force {slow}"
        )));
    }
    Ok(fast)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::Rotations;

    fn cycle_embedded(n: usize) -> EmbeddedGraph {
        let g = WeightedGraph::cycle(n);
        let mut lists = alloc::vec![Vec::new(); n];
        for v in 0..n {
            let e_out = v;
            let e_in = (v + n - 1) % n;
            lists[v] = alloc::vec![(e_out, 0), (e_in, 1)];
        }
        EmbeddedGraph::new(g, Rotations::full(lists)).unwrap()
    }

    fn k4_embedded() -> EmbeddedGraph {
        let mut g = WeightedGraph::new(4);
        let e01 = g.add_unit_edge(0, 1);
        let e12 = g.add_unit_edge(1, 2);
        let e20 = g.add_unit_edge(2, 0);
        let e03 = g.add_unit_edge(0, 3);
        let e13 = g.add_unit_edge(1, 3);
        let e23 = g.add_unit_edge(2, 3);
        let rot = Rotations::full(alloc::vec![
            alloc::vec![(e01, 0), (e03, 0), (e20, 1)],
            alloc::vec![(e12, 0), (e13, 0), (e01, 1)],
            alloc::vec![(e20, 0), (e23, 0), (e12, 1)],
            alloc::vec![(e03, 1), (e13, 1), (e23, 1)],
        ]);
        EmbeddedGraph::new(g, rot).unwrap()
    }

    #[test]
    fn orientation_invariant_c4() {
        let eg = cycle_embedded(4);
        let o = pfaffian_orientation(&eg).unwrap();
        assert!(orientation_faces_odd(&eg, &o));
    }

    #[test]
    fn orientation_invariant_k4() {
        let eg = k4_embedded();
        let o = pfaffian_orientation(&eg).unwrap();
        assert!(orientation_faces_odd(&eg, &o));
    }

    #[test]
    fn tree_orientation_trivial() {
        let mut g = WeightedGraph::new(3);
        let e01 = g.add_unit_edge(0, 1);
        let e12 = g.add_unit_edge(1, 2);
        let rot = Rotations::full(alloc::vec![
            alloc::vec![(e01, 0)],
            alloc::vec![(e01, 1), (e12, 0)],
            alloc::vec![(e12, 1)],
        ]);
        let eg = EmbeddedGraph::new(g, rot).unwrap();
        let o = pfaffian_orientation(&eg).unwrap();
        assert!(orientation_faces_odd(&eg, &o));
    }

    #[test]
    fn fkt_small_graphs() {
        assert_eq!(perfmatch_fkt(&k4_embedded()).unwrap(), Scalar::from_int(3));
        assert_eq!(perfmatch_fkt(&cycle_embedded(4)).unwrap(), Scalar::from_int(2));
        assert_eq!(perfmatch_fkt(&cycle_embedded(6)).unwrap(), Scalar::from_int(2));
        assert_eq!(perfmatch_fkt(&cycle_embedded(5)).unwrap(), Scalar::zero());
    }

    #[test]
    fn fkt_signed_weights() {
        // C4 with one weight -1: 1*1 + (-1)*1 = 0.
        let mut eg = cycle_embedded(4);
        eg.graph.edges[0].weight = -Scalar::one();
        assert_eq!(perfmatch_fkt(&eg).unwrap(), Scalar::zero());
        assert_eq!(perfmatch_bruteforce(&eg.graph), Scalar::zero());
    }

    #[test]
    fn grid_4x4_is_36() {
        // 4x4 grid graph; the classical dimer count is 36.
        let n = 4;
        let mut g = WeightedGraph::new(n * n);
        let mut lists = alloc::vec![Vec::new(); n * n];
        let id = |r: usize, c: usize| r * n + c;
        let mut horiz = alloc::vec![alloc::vec![usize::MAX; n]; n];
        let mut vert = alloc::vec![alloc::vec![usize::MAX; n]; n];
        for r in 0..n {
            for c in 0..n {
                if c + 1 < n {
                    horiz[r][c] = g.add_unit_edge(id(r, c), id(r, c + 1));
                }
                if r + 1 < n {
                    vert[r][c] = g.add_unit_edge(id(r, c), id(r + 1, c));
                }
            }
        }
        // CCW rotation: E, N, W, S (rows grow downward).
        for r in 0..n {
            for c in 0..n {
                let mut l = Vec::new();
                if c + 1 < n {
                    l.push((horiz[r][c], 0));
                }
                if r > 0 {
                    l.push((vert[r - 1][c], 1));
                }
                if c > 0 {
                    l.push((horiz[r][c - 1], 1));
                }
                if r + 1 < n {
                    l.push((vert[r][c], 0));
                }
                lists[id(r, c)] = l;
            }
        }
        let eg = EmbeddedGraph::new(g, Rotations::full(lists)).unwrap();
        assert_eq!(perfmatch_fkt(&eg).unwrap(), Scalar::from_int(36));
    }

    #[test]
    fn apex_empty_equals_fkt() {
        let eg = k4_embedded();
        let v = perfmatch_apex(&eg.graph, &[], &eg.rotations).unwrap();
        assert_eq!(v, Scalar::from_int(3));
    }

    #[test]
    fn apex_k33_minus_vertex() {
        // K3,3 with one left vertex as apex; the rest is planar.
        let g = WeightedGraph::complete_bipartite(3, 3);
        // Planar drawing of K2,3: left 1,2 and right 3,4,5.
        // Vertex 1 sees 3,4,5 left-to-right; vertex 2 sees them right-to-left.
        let eids = |u: usize, v: usize| -> usize {
            g.edges
                .iter()
                .position(|e| (e.u, e.v) == (u, v) || (e.u, e.v) == (v, u))
                .unwrap()
        };
        let lists = alloc::vec![
            None,
            Some(alloc::vec![(eids(1, 3), 0), (eids(1, 4), 0), (eids(1, 5), 0)]),
            Some(alloc::vec![(eids(2, 5), 0), (eids(2, 4), 0), (eids(2, 3), 0)]),
            Some(alloc::vec![(eids(1, 3), 1), (eids(2, 3), 1)]),
            Some(alloc::vec![(eids(1, 4), 1), (eids(2, 4), 1)]),
            Some(alloc::vec![(eids(1, 5), 1), (eids(2, 5), 1)]),
        ];
        let v = perfmatch_apex(&g, &[0], &Rotations(lists)).unwrap();
        assert_eq!(v, Scalar::from_int(6));
    }
}
