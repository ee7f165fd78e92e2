//! Deterministic generators for randomized verification: embedded planar
//! graphs grown by face splitting, k-apex extensions, and random balanced
//! grid-tiling instances. Everything is seeded and reproducible; the
//! generator owns its own tiny PRNG so the crate stays dependency-free.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::embedding::{trace_faces, Dart, EmbeddedGraph, Rotations};
use crate::gate::Gate;
use crate::graph::WeightedGraph;
use crate::gridtiling::GridTilingInstance;
use crate::scalar::{Rational, Scalar};
use crate::sig_graph::{SigGraphBuilder, SignatureGraph};
use crate::signature::Signature;

/// SplitMix64: tiny, seedable, good enough for test-case generation.
#[derive(Clone, Debug)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in 0..bound.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0);
        (self.next_u64() % bound as u64) as usize
    }

    pub fn chance(&mut self, num: u32, den: u32) -> bool {
        (self.next_u64() % u64::from(den)) < u64::from(num)
    }

    /// A small rational in [-max, max] with denominator up to `den`.
    pub fn rational(&mut self, max: i64, den: i64) -> Rational {
        let n = (self.next_u64() % (2 * max as u64 + 1)) as i64 - max;
        let d = (self.next_u64() % den as u64) as i64 + 1;
        Rational::new(n, d)
    }

    /// A Gaussian rational; the imaginary part appears with chance 1/3.
    pub fn scalar(&mut self, max: i64) -> Scalar {
        let re = self.rational(max, 3);
        let im = if self.chance(1, 3) { self.rational(max, 2) } else { Rational::zero() };
        Scalar::new(re, im)
    }

    /// A nonzero small scalar.
    pub fn nonzero_scalar(&mut self, max: i64) -> Scalar {
        loop {
            let s = self.scalar(max);
            if !s.is_zero() {
                return s;
            }
        }
    }
}

/// Grows a random embedded planar multigraph with `target` vertices by
/// repeatedly splitting faces: either a new edge between two face
/// vertices (possibly parallel to an existing edge) or a new vertex
/// hanging into a face. The rotation system is maintained combinatorially
/// and stays planar by construction.
pub fn random_planar_embedded(rng: &mut Rng, target: usize, extra_edges: usize) -> EmbeddedGraph {
    // Seed: a single edge.
    let mut g = WeightedGraph::new(2);
    g.add_edge(0, 1, Scalar::one());
    let mut rot: Vec<Vec<Dart>> = alloc::vec![alloc::vec![(0, 0)], alloc::vec![(0, 1)]];

    let grow = |g: &mut WeightedGraph, rot: &mut Vec<Vec<Dart>>, rng: &mut Rng, add_vertex: bool| {
        let faces = trace_faces(g, &Rotations::full(rot.clone()));
        let f = &faces[rng.below(faces.len())];
        // Pick two darts of the face walk; insert the new edge so that it
        // splits the face: the new edge end at each dart's origin vertex
        // is placed immediately before that dart in the rotation.
        let di = f[rng.below(f.len())];
        let dj = f[rng.below(f.len())];
        let origin = |d: Dart| -> usize {
            let e = &g.edges[d.0];
            if d.1 == 0 {
                e.u
            } else {
                e.v
            }
        };
        let (u, v) = (origin(di), origin(dj));
        if add_vertex {
            // New pendant vertex inside the face, attached at u.
            let w = g.n;
            g.n += 1;
            let e = g.add_edge(u, w, rng.nonzero_scalar(3));
            rot.push(alloc::vec![(e, 1)]);
            let pos = rot[u].iter().position(|&d| d == di).expect("dart at origin");
            rot[u].insert(pos, (e, 0));
        } else {
            if u == v && di == dj {
                return; // avoid degenerate loops
            }
            let e = g.add_edge(u, v, rng.nonzero_scalar(3));
            let pos_u = rot[u].iter().position(|&d| d == di).expect("dart at origin");
            rot[u].insert(pos_u, (e, 0));
            let pos_v = rot[v].iter().position(|&d| d == dj).expect("dart at origin");
            rot[v].insert(pos_v, (e, 1));
        }
    };

    while g.n < target {
        grow(&mut g, &mut rot, rng, true);
    }
    for _ in 0..extra_edges {
        grow(&mut g, &mut rot, rng, false);
    }
    EmbeddedGraph::new(g, Rotations::full(rot)).expect("face splitting keeps planarity")
}

/// A random k-apex graph: a planar embedded base plus `k` apex vertices
/// joined to random base vertices. Returns the graph, the apex list and
/// the witness with `None` on the apices.
pub fn random_apex_graph(
    rng: &mut Rng,
    base_vertices: usize,
    extra_edges: usize,
    k: usize,
) -> (WeightedGraph, Vec<usize>, Rotations) {
    let eg = random_planar_embedded(rng, base_vertices, extra_edges);
    let mut g = eg.graph;
    let mut lists: Vec<Option<Vec<Dart>>> = eg.rotations.0;
    let mut apices = Vec::new();
    for _ in 0..k {
        let a = g.n;
        g.n += 1;
        lists.push(None);
        apices.push(a);
        let degree = 1 + rng.below(base_vertices.min(5));
        let mut targets = BTreeSet::new();
        while targets.len() < degree {
            targets.insert(rng.below(base_vertices));
        }
        for t in targets {
            g.add_edge(a, t, rng.nonzero_scalar(2));
        }
    }
    (g, apices, Rotations(lists))
}

/// A random closed signature graph with dense random signatures: `nv`
/// vertices, every vertex of positive degree, moderately sparse support.
pub fn random_signature_graph(rng: &mut Rng, nv: usize, extra_edges: usize) -> SignatureGraph {
    let mut b = SigGraphBuilder::new();
    for _ in 0..nv {
        b.add_vertex(Signature::hw1(0)); // placeholder, arity fixed below
    }
    // A random spanning tree keeps every vertex wired.
    for v in 1..nv {
        let u = rng.below(v);
        b.add_edge(u, v, rng.nonzero_scalar(2));
    }
    for _ in 0..extra_edges {
        let u = rng.below(nv);
        let v = rng.below(nv);
        b.add_edge(u, v, rng.nonzero_scalar(2));
    }
    let mut g = b.finish(None).expect("builder output is consistent");
    for v in 0..nv {
        g.sigs[v] = random_dense_signature(rng, g.incidence[v].len());
    }
    g.validate().expect("dense arities match degrees");
    g
}

/// A random dense signature whose table is mostly sparse; entries are
/// small integers so Holants stay readable in failures.
pub fn random_dense_signature(rng: &mut Rng, arity: usize) -> Signature {
    let table = (0..1usize << arity)
        .map(|_| {
            if rng.chance(3, 5) {
                Scalar::zero()
            } else {
                Scalar::from_int(rng.below(5) as i64 - 2)
            }
        })
        .collect();
    Signature::dense(arity, table).expect("table sized to arity")
}

/// A random gate: a few internal vertices with dense signatures plus
/// `arity` dangling ports distributed over them.
pub fn random_gate(rng: &mut Rng, arity: usize, internal: usize) -> Gate {
    let mut b = SigGraphBuilder::new();
    for _ in 0..internal {
        b.add_vertex(Signature::hw1(0));
    }
    for v in 1..internal {
        let u = rng.below(v);
        b.add_edge(u, v, rng.nonzero_scalar(2));
    }
    for _ in 0..rng.below(internal + 1) {
        let u = rng.below(internal);
        let v = rng.below(internal);
        b.add_edge(u, v, rng.nonzero_scalar(2));
    }
    let dangling: Vec<usize> = (0..arity).map(|_| b.add_dangling(rng.below(internal))).collect();
    let mut g = b.finish(None).expect("builder output is consistent");
    for v in 0..internal {
        g.sigs[v] = random_dense_signature(rng, g.incidence[v].len());
    }
    g.validate().expect("dense arities match degrees");
    Gate::new(g, dangling).expect("dangling list covers the ports")
}

/// A random grid-tiling instance with every constraint set balanced to
/// exactly `t` entries per column (vertical) or row (horizontal).
pub fn random_balanced_instance(
    rng: &mut Rng,
    n: usize,
    k: usize,
    cells: usize,
    t: usize,
    vertical: bool,
) -> GridTilingInstance {
    let mut constraints: BTreeMap<(usize, usize), BTreeSet<(usize, usize)>> = BTreeMap::new();
    while constraints.len() < cells.min(k * k) {
        let cell = (1 + rng.below(k), 1 + rng.below(k));
        if constraints.contains_key(&cell) {
            continue;
        }
        let mut set = BTreeSet::new();
        for line in 1..=n {
            // Choose t distinct partners for this line.
            let mut partners = BTreeSet::new();
            while partners.len() < t {
                partners.insert(1 + rng.below(n));
            }
            for p in partners {
                set.insert(if vertical { (p, line) } else { (line, p) });
            }
        }
        constraints.insert(cell, set);
    }
    GridTilingInstance::new(n, k, constraints).expect("generated in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridtiling::BalanceDirection;

    #[test]
    fn generated_planar_graphs_validate() {
        let mut rng = Rng::new(7);
        for _ in 0..20 {
            let eg = random_planar_embedded(&mut rng, 8, 6);
            eg.validate().unwrap();
        }
    }

    #[test]
    fn generated_instances_are_balanced() {
        let mut rng = Rng::new(11);
        for _ in 0..10 {
            let t = random_balanced_instance(&mut rng, 2, 2, 2, 1, true);
            assert_eq!(t.is_balanced(BalanceDirection::Vertical), Some(1));
            let h = random_balanced_instance(&mut rng, 3, 2, 2, 2, false);
            assert_eq!(h.is_balanced(BalanceDirection::Horizontal), Some(2));
        }
    }

    #[test]
    fn rng_is_deterministic() {
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
