//! Brute-force weighted perfect matching: the semantic oracle that every
//! faster path (FKT, apex enumeration, genus expansion) is checked against.

use alloc::vec::Vec;

use crate::graph::WeightedGraph;
use crate::scalar::Scalar;

/// Exact weighted perfect-matching sum by recursive search. Always picks a
/// vertex of minimum remaining degree, so forced edges propagate first.
/// Returns 0 on odd vertex count; self-loops never participate.
pub fn perfmatch_bruteforce(g: &WeightedGraph) -> Scalar {
    if g.n % 2 != 0 {
        return Scalar::zero();
    }
    let adj = g.adjacency();
    let mut matched = alloc::vec![false; g.n];
    rec(g, &adj, &mut matched, g.n)
}

fn rec(
    g: &WeightedGraph,
    adj: &[Vec<(usize, usize)>],
    matched: &mut [bool],
    remaining: usize,
) -> Scalar {
    if remaining == 0 {
        return Scalar::one();
    }
    // Vertex with fewest available partners; bail out on isolated ones.
    let mut best: Option<(usize, usize)> = None;
    for v in 0..g.n {
        if matched[v] {
            continue;
        }
        let deg = adj[v]
            .iter()
            .filter(|&&(_, w)| w != v && !matched[w])
            .count();
        if best.map_or(true, |(_, d)| deg < d) {
            best = Some((v, deg));
            if deg == 0 {
                break;
            }
        }
    }
    let (v, deg) = best.expect("some vertex unmatched");
    if deg == 0 {
        return Scalar::zero();
    }
    let mut acc = Scalar::zero();
    matched[v] = true;
    for &(eid, w) in &adj[v] {
        if w == v || matched[w] {
            continue;
        }
        let weight = &g.edges[eid].weight;
        if weight.is_zero() {
            continue;
        }
        matched[w] = true;
        let sub = rec(g, adj, matched, remaining - 2);
        if !sub.is_zero() {
            acc += &(weight * &sub);
        }
        matched[w] = false;
    }
    matched[v] = false;
    acc
}

/// Finds one perfect matching (as edge ids) if any exists, by the same
/// min-degree search. Used by the FKT sign normalization.
pub fn find_perfect_matching(g: &WeightedGraph) -> Option<Vec<usize>> {
    if g.n % 2 != 0 {
        return None;
    }
    let adj = g.adjacency();
    let mut matched = alloc::vec![false; g.n];
    let mut chosen = Vec::new();
    if find_rec(g, &adj, &mut matched, g.n, &mut chosen) {
        Some(chosen)
    } else {
        None
    }
}

fn find_rec(
    g: &WeightedGraph,
    adj: &[Vec<(usize, usize)>],
    matched: &mut [bool],
    remaining: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if remaining == 0 {
        return true;
    }
    let mut best: Option<(usize, usize)> = None;
    for v in 0..g.n {
        if matched[v] {
            continue;
        }
        let deg = adj[v]
            .iter()
            .filter(|&&(_, w)| w != v && !matched[w])
            .count();
        if best.map_or(true, |(_, d)| deg < d) {
            best = Some((v, deg));
            if deg == 0 {
                break;
            }
        }
    }
    let (v, deg) = best.expect("some vertex unmatched");
    if deg == 0 {
        return false;
    }
    matched[v] = true;
    for &(eid, w) in &adj[v] {
        if w == v || matched[w] {
            continue;
        }
        matched[w] = true;
        chosen.push(eid);
        if find_rec(g, adj, matched, remaining - 2, chosen) {
            return true;
        }
        chosen.pop();
        matched[w] = false;
    }
    matched[v] = false;
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    #[test]
    fn small_graphs() {
        assert_eq!(perfmatch_bruteforce(&WeightedGraph::cycle(3)), Scalar::zero());
        assert_eq!(perfmatch_bruteforce(&WeightedGraph::complete(4)), Scalar::from_int(3));
        assert_eq!(
            perfmatch_bruteforce(&WeightedGraph::complete_bipartite(3, 3)),
            Scalar::from_int(6)
        );
        assert_eq!(perfmatch_bruteforce(&WeightedGraph::cycle(6)), Scalar::from_int(2));
    }

    #[test]
    fn weighted_cycle() {
        // C4 with weights 2,1,3,1: matchings {2,3} and {1,1}.
        let mut g = WeightedGraph::new(4);
        g.add_edge(0, 1, Scalar::from_int(2));
        g.add_edge(1, 2, Scalar::from_int(1));
        g.add_edge(2, 3, Scalar::from_int(3));
        g.add_edge(3, 0, Scalar::from_int(1));
        assert_eq!(perfmatch_bruteforce(&g), Scalar::from_int(7));
    }

    #[test]
    fn bipartite_equals_permanent() {
        use crate::matrix::permanent;
        use rand::rngs::SmallRng;
        use rand::{Rng, SeedableRng};
        let mut rng = SmallRng::seed_from_u64(23);
        for _ in 0..10 {
            let mut g = WeightedGraph::new(12);
            for u in 0..6 {
                for v in 6..12 {
                    if rng.gen_bool(0.6) {
                        g.add_edge(u, v, Scalar::from_int(rng.gen_range(-3..=3)));
                    }
                }
            }
            let left: Vec<usize> = (0..6).collect();
            let m = g.biadjacency(&left).unwrap();
            assert_eq!(perfmatch_bruteforce(&g), permanent(&m).unwrap());
        }
    }

    #[test]
    fn parallel_edges_add() {
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, Scalar::from_int(2));
        g.add_edge(0, 1, Scalar::from_int(5));
        assert_eq!(perfmatch_bruteforce(&g), Scalar::from_int(7));
    }

    #[test]
    fn find_matching() {
        let m = find_perfect_matching(&WeightedGraph::complete(4)).unwrap();
        assert_eq!(m.len(), 2);
        assert!(find_perfect_matching(&WeightedGraph::cycle(5)).is_none());
    }
}
