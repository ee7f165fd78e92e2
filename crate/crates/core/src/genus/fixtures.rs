//! Hand-built plane models and generators used by tests and the CLI demo
//! files. Plane models are inputs to the genus pipeline, not computed.

use alloc::vec::Vec;

use crate::embedding::Rotations;
use crate::graph::WeightedGraph;
use crate::scalar::Scalar;

use super::{BunchEdge, CrossCap, Handle, PlaneModel};

/// K4 embedded in the plane: the trivial model with no caps.
pub fn k4_trivial() -> PlaneModel {
    let mut g = WeightedGraph::new(4);
    let e01 = g.add_unit_edge(0, 1);
    let e12 = g.add_unit_edge(1, 2);
    let e20 = g.add_unit_edge(2, 0);
    let e03 = g.add_unit_edge(0, 3);
    let e13 = g.add_unit_edge(1, 3);
    let e23 = g.add_unit_edge(2, 3);
    let rotations = Rotations::full(alloc::vec![
        alloc::vec![(e01, 0), (e03, 0), (e20, 1)],
        alloc::vec![(e12, 0), (e13, 0), (e01, 1)],
        alloc::vec![(e20, 0), (e23, 0), (e12, 1)],
        alloc::vec![(e03, 1), (e13, 1), (e23, 1)],
    ]);
    PlaneModel { graph: g, rotations, handles: Vec::new(), crosscaps: Vec::new() }
}

/// The shared K3,3 drawing: parts u = {0,1,2}, v = {3,4,5}; the edges
/// u2-v3 and u3-v1 leave the disk, with boundary attachment order
/// (u2, u3, v3, v1) counterclockwise. This order serves both the torus
/// pattern (bunch a, bunch b, a entries, b entries) and the projective
/// pattern (exits then entries in the same order).
fn k33_disk() -> (WeightedGraph, Rotations, usize, usize) {
    // Vertices: u1=0, u2=1, u3=2, v1=3, v2=4, v3=5, drawn at
    // u1 (0,2), v1 (-2,0), v2 (0,0), v3 (2,0), u2 (-1,-1), u3 (1,-1).
    let mut g = WeightedGraph::new(6);
    let e_u1v1 = g.add_unit_edge(0, 3);
    let e_u1v2 = g.add_unit_edge(0, 4);
    let e_u1v3 = g.add_unit_edge(0, 5);
    let e_u2v1 = g.add_unit_edge(1, 3);
    let e_u2v2 = g.add_unit_edge(1, 4);
    let e_u3v2 = g.add_unit_edge(2, 4);
    let e_u3v3 = g.add_unit_edge(2, 5);
    let e_u2v3 = g.add_unit_edge(1, 5); // leaves the disk near u2
    let e_u3v1 = g.add_unit_edge(2, 3); // leaves the disk near u3
    let rotations = Rotations::full(alloc::vec![
        alloc::vec![(e_u1v1, 0), (e_u1v2, 0), (e_u1v3, 0)],
        alloc::vec![(e_u2v2, 0), (e_u2v1, 0), (e_u2v3, 0)],
        alloc::vec![(e_u3v3, 0), (e_u3v2, 0), (e_u3v1, 0)],
        alloc::vec![(e_u1v1, 1), (e_u3v1, 1), (e_u2v1, 1)],
        alloc::vec![(e_u1v2, 1), (e_u2v2, 1), (e_u3v2, 1)],
        alloc::vec![(e_u2v3, 1), (e_u1v3, 1), (e_u3v3, 1)],
    ]);
    (g, rotations, e_u2v3, e_u3v1)
}

/// K3,3 on the torus: one handle, bunches {u2-v3} and {u3-v1}.
pub fn k33_torus() -> PlaneModel {
    let (graph, rotations, a, b) = k33_disk();
    PlaneModel {
        graph,
        rotations,
        handles: alloc::vec![Handle {
            bunch_a: alloc::vec![BunchEdge { edge: a, exit_end: 0 }],
            bunch_b: alloc::vec![BunchEdge { edge: b, exit_end: 0 }],
        }],
        crosscaps: Vec::new(),
    }
}

/// K3,3 on the projective plane: one cross cap carrying both edges.
pub fn k33_projective() -> PlaneModel {
    let (graph, rotations, a, b) = k33_disk();
    PlaneModel {
        graph,
        rotations,
        handles: Vec::new(),
        crosscaps: alloc::vec![CrossCap {
            bunch: alloc::vec![
                BunchEdge { edge: a, exit_end: 0 },
                BunchEdge { edge: b, exit_end: 0 },
            ],
        }],
    }
}

/// C4 on the Klein bottle: two cross caps, one edge through each.
/// Vertices b(1,1)... wait: a=0 at (1,-1), b=1 at (1,1), c=2 at (-1,1),
/// d=3 at (-1,-1); interior edges ab, cd; bc and da leave the disk.
pub fn c4_klein() -> PlaneModel {
    let mut g = WeightedGraph::new(4);
    let e_ab = g.add_unit_edge(0, 1);
    let e_cd = g.add_unit_edge(2, 3);
    let e_bc = g.add_unit_edge(1, 2);
    let e_da = g.add_unit_edge(3, 0);
    let rotations = Rotations::full(alloc::vec![
        alloc::vec![(e_ab, 0), (e_da, 1)],
        alloc::vec![(e_bc, 0), (e_ab, 1)],
        alloc::vec![(e_bc, 1), (e_cd, 0)],
        alloc::vec![(e_cd, 1), (e_da, 0)],
    ]);
    PlaneModel {
        graph: g,
        rotations,
        handles: Vec::new(),
        crosscaps: alloc::vec![
            CrossCap { bunch: alloc::vec![BunchEdge { edge: e_bc, exit_end: 0 }] },
            CrossCap { bunch: alloc::vec![BunchEdge { edge: e_da, exit_end: 0 }] },
        ],
    }
}

/// An a x b toroidal grid model (a, b >= 2): the planar grid inside the
/// disk, row wraps through one side of the handle (ordered bottom row
/// first), column wraps through the other (rightmost column first). Edges
/// may be dropped and weighted through the `keep` callback; wrap edges
/// that are dropped simply leave the bunches smaller.
pub fn toroidal_grid<F>(rows: usize, cols: usize, mut keep: F) -> PlaneModel
where
    F: FnMut(usize, usize, usize, usize) -> Option<Scalar>,
{
    assert!(rows >= 2 && cols >= 2, "degenerate torus");
    let id = |r: usize, c: usize| r * cols + c;
    let mut g = WeightedGraph::new(rows * cols);
    // Edge catalog: slots per vertex are E, N, W, S in counterclockwise
    // order (rows grow downward).
    let mut east: Vec<Vec<Option<usize>>> = alloc::vec![alloc::vec![None; cols]; rows];
    let mut south: Vec<Vec<Option<usize>>> = alloc::vec![alloc::vec![None; cols]; rows];
    let mut bunch_a = Vec::new(); // row wraps, exit at the east border
    let mut bunch_b = Vec::new(); // column wraps, exit at the north border
    for r in 0..rows {
        for c in 0..cols {
            // Eastward edge (wraps at the last column).
            if c + 1 < cols {
                if let Some(w) = keep(r, c, r, c + 1) {
                    east[r][c] = Some(g.add_edge(id(r, c), id(r, c + 1), w));
                }
            }
            // Southward edge (wraps at the last row).
            if r + 1 < rows {
                if let Some(w) = keep(r, c, r + 1, c) {
                    south[r][c] = Some(g.add_edge(id(r, c), id(r + 1, c), w));
                }
            }
        }
    }
    // Row wrap edges, bottom row first along the east side.
    for r in (0..rows).rev() {
        if let Some(w) = keep(r, cols - 1, r, 0) {
            let e = g.add_edge(id(r, cols - 1), id(r, 0), w);
            east[r][cols - 1] = Some(e);
            bunch_a.push(BunchEdge { edge: e, exit_end: 0 });
        }
    }
    // Column wrap edges, rightmost column first along the north side;
    // their exit is the north end, i.e. the (0, c) endpoint.
    for c in (0..cols).rev() {
        if let Some(w) = keep(rows - 1, c, 0, c) {
            let e = g.add_edge(id(rows - 1, c), id(0, c), w);
            south[rows - 1][c] = Some(e);
            bunch_b.push(BunchEdge { edge: e, exit_end: 1 });
        }
    }
    let mut lists = alloc::vec![Vec::new(); rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let mut l = Vec::new();
            if let Some(e) = east[r][c] {
                l.push((e, 0));
            }
            // North: the southward edge of the row above, or the wrap.
            let nr = if r == 0 { rows - 1 } else { r - 1 };
            if let Some(e) = south[nr][c] {
                l.push((e, 1));
            }
            // West: the eastward edge of the column to the left, or wrap.
            let wc = if c == 0 { cols - 1 } else { c - 1 };
            if let Some(e) = east[r][wc] {
                l.push((e, 1));
            }
            if let Some(e) = south[r][c] {
                l.push((e, 0));
            }
            lists[id(r, c)] = l;
        }
    }
    PlaneModel {
        graph: g,
        rotations: Rotations::full(lists),
        handles: alloc::vec![Handle { bunch_a, bunch_b }],
        crosscaps: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genus::genus_perfmatch;
    use crate::matching::perfmatch_bruteforce;
    use crate::scalar::Scalar;

    #[test]
    fn k4_trivial_model() {
        let (value, count) = genus_perfmatch(&k4_trivial()).unwrap();
        assert_eq!(value, Scalar::from_int(3));
        assert_eq!(count, 1);
    }

    #[test]
    fn k33_on_torus() {
        let pm = k33_torus();
        let (value, count) = genus_perfmatch(&pm).unwrap();
        assert_eq!(value, Scalar::from_int(6));
        assert_eq!(count, 4);
        assert_eq!(perfmatch_bruteforce(&pm.graph), Scalar::from_int(6));
    }

    #[test]
    fn k33_on_projective_plane() {
        let pm = k33_projective();
        let (value, count) = genus_perfmatch(&pm).unwrap();
        assert_eq!(value, Scalar::from_int(6));
        assert_eq!(count, 2);
    }

    #[test]
    fn c4_on_klein_bottle() {
        let pm = c4_klein();
        let (value, count) = genus_perfmatch(&pm).unwrap();
        assert_eq!(value, Scalar::from_int(2));
        assert_eq!(count, 4);
    }

    #[test]
    fn full_torus_grids_match_brute_force() {
        for (a, b) in [(2, 2), (2, 3), (3, 3), (2, 4)] {
            let pm = toroidal_grid(a, b, |_, _, _, _| Some(Scalar::one()));
            let want = perfmatch_bruteforce(&pm.graph);
            let (got, count) = genus_perfmatch(&pm).unwrap();
            assert_eq!(got, want, "{a}x{b} torus");
            assert_eq!(count, 4);
        }
    }

    #[test]
    fn random_toroidal_subgraphs_match_brute_force() {
        use rand::rngs::SmallRng;
        use rand::{Rng, SeedableRng};
        let mut rng = SmallRng::seed_from_u64(41);
        for trial in 0..12 {
            let (a, b) = [(2, 3), (3, 3), (2, 4), (4, 4)][trial % 4];
            let pm = toroidal_grid(a, b, |_, _, _, _| {
                rng.gen_bool(0.85)
                    .then(|| Scalar::from_int(rng.gen_range(-2..=3)))
            });
            let want = perfmatch_bruteforce(&pm.graph);
            let (got, _) = genus_perfmatch(&pm).unwrap();
            assert_eq!(got, want, "trial {trial}");
        }
    }
}
