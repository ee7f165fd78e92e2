//! Rotation systems (combinatorial embeddings), face tracing and the Euler
//! planarity check. Embeddings are always witnesses: they are produced by
//! generators or carried through constructions, never recomputed by a
//! planarity test.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::Scalar;

/// A dart is one end of an edge: `(edge id, end)` with end 0 at `u`, end 1
/// at `v`. A dangling edge has only end 0.
pub type Dart = (usize, u8);

/// Per-vertex cyclic orders of incident darts, counterclockwise. `None`
/// marks a vertex excluded from the embedding (apices); edges incident to
/// excluded vertices carry no darts in any rotation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rotations(pub Vec<Option<Vec<Dart>>>);

impl Rotations {
    pub fn full(lists: Vec<Vec<Dart>>) -> Self {
        Rotations(lists.into_iter().map(Some).collect())
    }

    pub fn vertex(&self, v: usize) -> Option<&Vec<Dart>> {
        self.0[v].as_ref()
    }

    pub fn is_embedded(&self, v: usize) -> bool {
        self.0[v].is_some()
    }
}

/// An edge-weighted graph together with a rotation-system witness covering
/// all of its vertices.
#[derive(Clone, Debug)]
pub struct EmbeddedGraph {
    pub graph: WeightedGraph,
    pub rotations: Rotations,
}

impl EmbeddedGraph {
    pub fn new(graph: WeightedGraph, rotations: Rotations) -> Result<Self> {
        let eg = EmbeddedGraph { graph, rotations };
        eg.validate()?;
        Ok(eg)
    }

    pub fn validate(&self) -> Result<()> {
        validate_rotations(&self.graph, &self.rotations)?;
        euler_check(&self.graph, &self.rotations)
    }
}

fn endpoint(g: &WeightedGraph, d: Dart) -> usize {
    let e = &g.edges[d.0];
    if d.1 == 0 {
        e.u
    } else {
        e.v
    }
}

/// Checks that every edge's two darts appear exactly once, each in the
/// rotation of its own endpoint, and that embedded vertices list exactly
/// their incident darts. Edges touching an excluded vertex must not appear
/// in any rotation.
pub fn validate_rotations(g: &WeightedGraph, rot: &Rotations) -> Result<()> {
    if rot.0.len() != g.n {
        return Err(Error::Malformed("rotation table size mismatch".into()));
    }
    let mut seen = alloc::vec![[false; 2]; g.edges.len()];
    for (v, r) in rot.0.iter().enumerate() {
        let Some(list) = r else { continue };
        for &(eid, end) in list {
            if eid >= g.edges.len() || end > 1 {
                return Err(Error::Malformed("dart out of range".into()));
            }
            if endpoint(g, (eid, end)) != v {
                return Err(Error::Malformed(alloc::format!(
                    "dart ({eid},{end}) listed at wrong vertex {v}"
                )));
            }
            if seen[eid][end as usize] {
                return Err(Error::Malformed(alloc::format!(
                    "dart ({eid},{end}) listed twice"
                )));
            }
            seen[eid][end as usize] = true;
        }
    }
    for (eid, e) in g.edges.iter().enumerate() {
        let embedded = rot.is_embedded(e.u) && rot.is_embedded(e.v);
        let want = [embedded, embedded];
        let got = seen[eid];
        if got != want {
            return Err(Error::Malformed(alloc::format!(
                "edge {eid} darts inconsistent with embedding domain"
            )));
        }
    }
    Ok(())
}

/// Traces the faces of the embedded part. Each face is the cyclic list of
/// departing darts; every dart of an embedded edge lies in exactly one face.
pub fn trace_faces(g: &WeightedGraph, rot: &Rotations) -> Vec<Vec<Dart>> {
    // Position of each dart within its rotation, for successor lookup.
    let mut pos = alloc::vec![[usize::MAX; 2]; g.edges.len()];
    for r in rot.0.iter().flatten() {
        for (i, &(eid, end)) in r.iter().enumerate() {
            pos[eid][end as usize] = i;
        }
    }
    let mut face_of = alloc::vec![[usize::MAX; 2]; g.edges.len()];
    let mut faces = Vec::new();
    for e0 in 0..g.edges.len() {
        for s0 in 0..2u8 {
            if pos[e0][s0 as usize] == usize::MAX || face_of[e0][s0 as usize] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut walk = Vec::new();
            let (mut e, mut s) = (e0, s0);
            loop {
                face_of[e][s as usize] = id;
                walk.push((e, s as u8));
                // Depart from end s toward the other end; next dart is the
                // rotation successor at the arrival vertex.
                let t = 1 - s;
                let u = endpoint(g, (e, t));
                let r = rot.vertex(u).expect("embedded endpoint");
                let i = pos[e][t as usize];
                let (ne, ns) = r[(i + 1) % r.len()];
                e = ne;
                s = ns;
                if e == e0 && s == s0 {
                    break;
                }
            }
            faces.push(walk);
        }
    }
    faces
}

/// Euler check over the embedded part, per connected component: each
/// component with edges must satisfy V - E + F = 2 for its own traced
/// faces (tracing yields each component's outer face separately);
/// edgeless vertices are trivially planar.
pub fn euler_check(g: &WeightedGraph, rot: &Rotations) -> Result<()> {
    // Component labels over the embedded substructure.
    let mut comp = alloc::vec![usize::MAX; g.n];
    let mut c = 0usize;
    for s in 0..g.n {
        if !rot.is_embedded(s) || comp[s] != usize::MAX {
            continue;
        }
        let mut stack = alloc::vec![s];
        comp[s] = c;
        while let Some(v) = stack.pop() {
            for &(eid, _) in rot.vertex(v).expect("embedded") {
                let e = &g.edges[eid];
                for w in [e.u, e.v] {
                    if comp[w] == usize::MAX {
                        comp[w] = c;
                        stack.push(w);
                    }
                }
            }
        }
        c += 1;
    }
    let mut v_of = alloc::vec![0i64; c];
    let mut e_of = alloc::vec![0i64; c];
    let mut f_of = alloc::vec![0i64; c];
    for v in 0..g.n {
        if comp[v] != usize::MAX {
            v_of[comp[v]] += 1;
        }
    }
    for e in &g.edges {
        if rot.is_embedded(e.u) && rot.is_embedded(e.v) {
            e_of[comp[e.u]] += 1;
        }
    }
    for walk in trace_faces(g, rot) {
        let (eid, _) = walk[0];
        f_of[comp[g.edges[eid].u]] += 1;
    }
    for i in 0..c {
        if e_of[i] == 0 {
            continue; // a single edgeless vertex
        }
        if v_of[i] - e_of[i] + f_of[i] != 2 {
            return Err(Error::Validation(alloc::format!(
                "Euler check failed on component {i}: V={} E={} F={}",
                v_of[i], e_of[i], f_of[i]
            )));
        }
    }
    Ok(())
}

/// Removes self-loops and subdivides every parallel edge beyond the first
/// of its endpoint pair by a two-vertex path, preserving the weighted
/// perfect-matching sum and the embedding. FKT needs simple graphs so that
/// matrix entries never mix parallel edges.
pub fn simplify_for_fkt(g: &WeightedGraph, rot: &Rotations) -> (WeightedGraph, Rotations) {
    use alloc::collections::BTreeMap;
    let mut out = WeightedGraph::new(g.n);
    let mut lists: Vec<Option<Vec<Dart>>> = rot
        .0
        .iter()
        .map(|r| r.as_ref().map(|_| Vec::new()))
        .collect();
    // Map old darts to new darts; rotation lists rebuilt in old order.
    let mut dart_map: BTreeMap<Dart, Dart> = BTreeMap::new();
    let mut pair_seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (eid, e) in g.edges.iter().enumerate() {
        if e.u == e.v {
            continue; // self-loops never matched
        }
        let key = (e.u.min(e.v), e.u.max(e.v));
        let cnt = pair_seen.entry(key).or_insert(0);
        if *cnt == 0 {
            let ne = out.add_edge(e.u, e.v, e.weight.clone());
            dart_map.insert((eid, 0), (ne, 0));
            dart_map.insert((eid, 1), (ne, 1));
        } else {
            // u - a - b - v with the original weight on the first segment.
            let a = out.n;
            out.n += 2;
            lists.push(Some(Vec::new()));
            lists.push(Some(Vec::new()));
            let b = a + 1;
            let e1 = out.add_edge(e.u, a, e.weight.clone());
            let e2 = out.add_edge(a, b, Scalar::one());
            let e3 = out.add_edge(b, e.v, Scalar::one());
            dart_map.insert((eid, 0), (e1, 0));
            dart_map.insert((eid, 1), (e3, 1));
            if rot.is_embedded(e.u) && rot.is_embedded(e.v) {
                lists[a] = Some(alloc::vec![(e1, 1), (e2, 0)]);
                lists[b] = Some(alloc::vec![(e2, 1), (e3, 0)]);
            } else {
                lists[a] = None;
                lists[b] = None;
            }
        }
        *cnt += 1;
    }
    for (v, r) in rot.0.iter().enumerate() {
        if let Some(list) = r {
            let new_list = list
                .iter()
                .filter_map(|d| dart_map.get(d).copied())
                .collect();
            lists[v] = Some(new_list);
        }
    }
    (out, Rotations(lists))
}

/// Restriction of an embedded graph to the vertices with `keep[v]`.
/// Returns the restriction and the old-to-new vertex map.
pub fn restrict(
    g: &WeightedGraph,
    rot: &Rotations,
    keep: &[bool],
) -> (WeightedGraph, Rotations, Vec<usize>) {
    let mut map = alloc::vec![usize::MAX; g.n];
    let mut n = 0usize;
    for v in 0..g.n {
        if keep[v] {
            map[v] = n;
            n += 1;
        }
    }
    let mut out = WeightedGraph::new(n);
    let mut emap = alloc::vec![usize::MAX; g.edges.len()];
    for (eid, e) in g.edges.iter().enumerate() {
        if keep[e.u] && keep[e.v] {
            emap[eid] = out.add_edge(map[e.u], map[e.v], e.weight.clone());
        }
    }
    let mut lists = alloc::vec![None; n];
    for v in 0..g.n {
        if !keep[v] {
            continue;
        }
        if let Some(r) = rot.vertex(v) {
            lists[map[v]] = Some(
                r.iter()
                    .filter(|&&(eid, _)| emap[eid] != usize::MAX)
                    .map(|&(eid, end)| (emap[eid], end))
                    .collect(),
            );
        }
    }
    (out, Rotations(lists), map)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// C4 embedded: rotations in cyclic order.
    fn square() -> EmbeddedGraph {
        let mut g = WeightedGraph::new(4);
        let e01 = g.add_unit_edge(0, 1);
        let e12 = g.add_unit_edge(1, 2);
        let e23 = g.add_unit_edge(2, 3);
        let e30 = g.add_unit_edge(3, 0);
        // Vertices at corners, CCW order 0,1,2,3.
        let rot = Rotations::full(alloc::vec![
            alloc::vec![(e01, 0), (e30, 1)],
            alloc::vec![(e12, 0), (e01, 1)],
            alloc::vec![(e23, 0), (e12, 1)],
            alloc::vec![(e30, 0), (e23, 1)],
        ]);
        EmbeddedGraph::new(g, rot).unwrap()
    }

    #[test]
    fn square_faces() {
        let eg = square();
        let faces = trace_faces(&eg.graph, &eg.rotations);
        assert_eq!(faces.len(), 2);
        assert_eq!(faces.iter().map(Vec::len).sum::<usize>(), 8);
    }

    #[test]
    fn k4_embedded_euler() {
        // K4 drawn with vertex 3 in the center.
        let mut g = WeightedGraph::new(4);
        let e01 = g.add_unit_edge(0, 1);
        let e12 = g.add_unit_edge(1, 2);
        let e20 = g.add_unit_edge(2, 0);
        let e03 = g.add_unit_edge(0, 3);
        let e13 = g.add_unit_edge(1, 3);
        let e23 = g.add_unit_edge(2, 3);
        // Outer triangle 0,1,2 CCW; 3 inside.
        let rot = Rotations::full(alloc::vec![
            alloc::vec![(e01, 0), (e03, 0), (e20, 1)],
            alloc::vec![(e12, 0), (e13, 0), (e01, 1)],
            alloc::vec![(e20, 0), (e23, 0), (e12, 1)],
            alloc::vec![(e03, 1), (e13, 1), (e23, 1)],
        ]);
        let eg = EmbeddedGraph::new(g, rot).unwrap();
        let faces = trace_faces(&eg.graph, &eg.rotations);
        assert_eq!(faces.len(), 4);
    }

    #[test]
    fn nonplanar_rotation_rejected() {
        // K3,3 admits no planar rotation system, so the Euler check must
        // fail whatever cyclic orders we try.
        let g = WeightedGraph::complete_bipartite(3, 3);
        let mut lists = alloc::vec![Vec::new(); 6];
        for (eid, e) in g.edges.iter().enumerate() {
            lists[e.u].push((eid, 0u8));
            lists[e.v].push((eid, 1u8));
        }
        assert!(EmbeddedGraph::new(g, Rotations::full(lists)).is_err());
    }

    #[test]
    fn simplify_subdivides_parallels() {
        let mut g = WeightedGraph::new(2);
        let e1 = g.add_edge(0, 1, Scalar::from_int(2));
        let e2 = g.add_edge(0, 1, Scalar::from_int(5));
        let rot = Rotations::full(alloc::vec![
            alloc::vec![(e1, 0), (e2, 0)],
            alloc::vec![(e2, 1), (e1, 1)],
        ]);
        let (g2, rot2) = simplify_for_fkt(&g, &rot);
        assert_eq!(g2.n, 4);
        assert_eq!(g2.edges.len(), 4);
        validate_rotations(&g2, &rot2).unwrap();
        euler_check(&g2, &rot2).unwrap();
        use crate::matching::perfmatch_bruteforce;
        assert_eq!(perfmatch_bruteforce(&g2), Scalar::from_int(7));
    }
}
