//! Colored-subgraph instances and the reduction chain: clique counting to
//! partitioned subgraphs to grid tilings.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gridtiling::GridTilingInstance;

/// A [k]-colored simple graph on vertices 0..n with colors in 1..=k.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ColoredGraph {
    pub n: usize,
    pub colors: Vec<usize>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl ColoredGraph {
    pub fn new(colors: Vec<usize>, edges: BTreeSet<(usize, usize)>) -> Result<Self> {
        let n = colors.len();
        for &(u, v) in &edges {
            if u >= n || v >= n || u == v {
                return Err(Error::Malformed("bad colored-graph edge".into()));
            }
        }
        let edges = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        Ok(ColoredGraph { n, colors, edges })
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn color_classes(&self, k: usize) -> Vec<Vec<usize>> {
        let mut classes = alloc::vec![Vec::new(); k + 1];
        for (v, &c) in self.colors.iter().enumerate() {
            classes[c].push(v);
        }
        classes
    }
}

/// An instance of the partitioned subgraph problem: a colorful pattern H
/// (bijectively colored) and a [k]-colored host G.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartitionedSubInstance {
    pub k: usize,
    pub pattern: ColoredGraph,
    pub host: ColoredGraph,
}

impl PartitionedSubInstance {
    pub fn new(k: usize, pattern: ColoredGraph, host: ColoredGraph) -> Result<Self> {
        if pattern.n != k {
            return Err(Error::Malformed("pattern must have k vertices".into()));
        }
        let mut seen = alloc::vec![false; k + 1];
        for &c in &pattern.colors {
            if c == 0 || c > k || seen[c] {
                return Err(Error::Malformed("pattern coloring must be bijective".into()));
            }
            seen[c] = true;
        }
        for &c in &host.colors {
            if c == 0 || c > k {
                return Err(Error::Malformed("host color outside [k]".into()));
            }
        }
        Ok(PartitionedSubInstance { k, pattern, host })
    }

    /// Pattern edges as color pairs.
    pub fn pattern_color_edges(&self) -> BTreeSet<(usize, usize)> {
        self.pattern
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (self.pattern.colors[u], self.pattern.colors[v]);
                (a.min(b), a.max(b))
            })
            .collect()
    }

    /// Deletes host edges between color classes that are not adjacent in
    /// the pattern; the set of color-preserving copies is unaffected.
    pub fn preprocess(&self) -> PartitionedSubInstance {
        let allowed = self.pattern_color_edges();
        let edges = self
            .host
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| {
                let (a, b) = (self.host.colors[u], self.host.colors[v]);
                a != b && allowed.contains(&(a.min(b), a.max(b)))
            })
            .collect();
        PartitionedSubInstance {
            k: self.k,
            pattern: self.pattern.clone(),
            host: ColoredGraph { n: self.host.n, colors: self.host.colors.clone(), edges },
        }
    }
}

/// Brute-force count of color-preserving copies of the pattern in the
/// host: choose one host vertex per color and check all pattern edges.
pub fn count_psub(p: &PartitionedSubInstance) -> Result<u64> {
    let classes = p.host.color_classes(p.k);
    let mut size_prod = 1u64;
    for c in 1..=p.k {
        size_prod = size_prod.saturating_mul(classes[c].len() as u64);
        if size_prod > 200_000_000 {
            return Err(Error::Budget("count_psub enumeration".into()));
        }
    }
    // pattern vertex for each color
    let mut of_color = alloc::vec![usize::MAX; p.k + 1];
    for (v, &c) in p.pattern.colors.iter().enumerate() {
        of_color[c] = v;
    }
    let mut choice = alloc::vec![0usize; p.k + 1];
    fn rec(
        p: &PartitionedSubInstance,
        classes: &[Vec<usize>],
        of_color: &[usize],
        choice: &mut [usize],
        c: usize,
    ) -> u64 {
        if c > p.k {
            return 1;
        }
        let mut acc = 0u64;
        'cand: for &host_v in &classes[c] {
            // Check pattern edges toward already-chosen colors.
            for d in 1..c {
                let (pu, pv) = (of_color[c], of_color[d]);
                let need = p.pattern.has_edge(pu, pv);
                if need && !p.host.has_edge(host_v, choice[d]) {
                    continue 'cand;
                }
            }
            choice[c] = host_v;
            acc += rec(p, classes, of_color, choice, c + 1);
        }
        acc
    }
    Ok(rec(p, &classes, &of_color, &mut choice, 1))
}

/// Reduction from partitioned subgraph isomorphism to grid tiling. Both
/// graphs are made directed (each edge doubled) and get all self-loops;
/// constraint cells are the directed pattern color pairs, and T(i,j) is
/// the set of directed host edges from color i to color j, as vertex index
/// pairs. Grid tilings of the output correspond bijectively to the
/// color-preserving copies.
pub fn psub_to_gridtiling(p: &PartitionedSubInstance) -> Result<GridTilingInstance> {
    let p = p.preprocess();
    let n = p.host.n;
    let k = p.k;
    let mut constraints: BTreeMap<(usize, usize), BTreeSet<(usize, usize)>> = BTreeMap::new();
    // Self-loops on every color.
    for c in 1..=k {
        let set: BTreeSet<(usize, usize)> = p.host.color_classes(k)[c]
            .iter()
            .map(|&v| (v + 1, v + 1))
            .collect();
        constraints.insert((c, c), set);
    }
    // Directed edges in both directions.
    for &(u, v) in &p.host.edges {
        let (cu, cv) = (p.host.colors[u], p.host.colors[v]);
        constraints.entry((cu, cv)).or_default().insert((u + 1, v + 1));
        constraints.entry((cv, cu)).or_default().insert((v + 1, u + 1));
    }
    // Directed pattern edges with no host support still constrain (empty
    // sets kill all tilings, correctly).
    for &(a, b) in &p.pattern_color_edges() {
        constraints.entry((a, b)).or_default();
        constraints.entry((b, a)).or_default();
    }
    GridTilingInstance::new(n, k, constraints)
}

/// Reduction from k-clique counting to partitioned subgraphs by the
/// color-coded blow-up: vertex copies (v, i) colored i, edges between
/// copies of host-adjacent vertices with distinct colors. Copies overcount
/// cliques by exactly k!, the returned multiplier.
pub fn clique_to_psub(
    n: usize,
    edges: &BTreeSet<(usize, usize)>,
    k: usize,
) -> Result<(PartitionedSubInstance, u64)> {
    if k == 0 {
        return Err(Error::Malformed("k must be positive".into()));
    }
    // Pattern: a colorful k-clique.
    let mut pedges = BTreeSet::new();
    for a in 0..k {
        for b in a + 1..k {
            pedges.insert((a, b));
        }
    }
    let pattern = ColoredGraph::new((1..=k).collect(), pedges)?;
    // Host: the blow-up. Copy (v, i) has id v*k + i and color i+1.
    let mut colors = alloc::vec![0usize; n * k];
    for v in 0..n {
        for i in 0..k {
            colors[v * k + i] = i + 1;
        }
    }
    let mut hedges = BTreeSet::new();
    for &(u, v) in edges {
        if u == v {
            continue;
        }
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    let (a, b) = (u * k + i, v * k + j);
                    hedges.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    let host = ColoredGraph::new(colors, hedges)?;
    let inst = PartitionedSubInstance::new(k, pattern, host)?;
    let mut factorial = 1u64;
    for i in 2..=k as u64 {
        factorial *= i;
    }
    Ok((inst, factorial))
}

/// Brute-force k-clique counter, the oracle for the blow-up reduction.
pub fn count_cliques(n: usize, edges: &BTreeSet<(usize, usize)>, k: usize) -> u64 {
    fn rec(
        n: usize,
        edges: &BTreeSet<(usize, usize)>,
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
    ) -> u64 {
        if chosen.len() == k {
            return 1;
        }
        let mut acc = 0;
        for v in start..n {
            if chosen
                .iter()
                .all(|&u| edges.contains(&(u.min(v), u.max(v))))
            {
                chosen.push(v);
                acc += rec(n, edges, k, v + 1, chosen);
                chosen.pop();
            }
        }
        acc
    }
    rec(n, edges, k, 0, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridtiling::count_tilings;

    fn complete_edges(n: usize) -> BTreeSet<(usize, usize)> {
        let mut e = BTreeSet::new();
        for u in 0..n {
            for v in u + 1..n {
                e.insert((u, v));
            }
        }
        e
    }

    fn cycle_edges(n: usize) -> BTreeSet<(usize, usize)> {
        (0..n).map(|u| (u.min((u + 1) % n), u.max((u + 1) % n))).collect()
    }

    #[test]
    fn triangle_to_triangle() {
        // H = G = colorful triangle: exactly one copy, one tiling.
        let tri = ColoredGraph::new(alloc::vec![1, 2, 3], complete_edges(3)).unwrap();
        let p = PartitionedSubInstance::new(3, tri.clone(), tri).unwrap();
        assert_eq!(count_psub(&p).unwrap(), 1);
        let gt = psub_to_gridtiling(&p).unwrap();
        assert_eq!(count_tilings(&gt).unwrap(), 1);
        // |C| = 2|E(H)| + k.
        assert_eq!(gt.constraints.len(), 2 * 3 + 3);
    }

    #[test]
    fn blowup_counts_cliques() {
        for (n, edges, k, cliques) in [
            (4, complete_edges(4), 3, 4u64),
            (5, cycle_edges(5), 3, 0),
            (3, complete_edges(3), 3, 1),
        ] {
            assert_eq!(count_cliques(n, &edges, k), cliques);
            let (p, mult) = clique_to_psub(n, &edges, k).unwrap();
            assert_eq!(mult, 6);
            assert_eq!(count_psub(&p).unwrap(), mult * cliques);
        }
    }

    #[test]
    fn path_blowup_parsimonious_chain() {
        // H = colorful path on 3 colors; G = 2-blow-up per color.
        let pattern = ColoredGraph::new(
            alloc::vec![1, 2, 3],
            [(0, 1), (1, 2)].into_iter().collect(),
        )
        .unwrap();
        // Host: colors 1,1,2,2,3,3; complete bipartite between consecutive
        // classes: copies = 2*2*2 = 8 path choices.
        let mut edges = BTreeSet::new();
        for a in [0, 1] {
            for b in [2, 3] {
                edges.insert((a, b));
            }
        }
        for b in [2, 3] {
            for c in [4, 5] {
                edges.insert((b, c));
            }
        }
        let host = ColoredGraph::new(alloc::vec![1, 1, 2, 2, 3, 3], edges).unwrap();
        let p = PartitionedSubInstance::new(3, pattern, host).unwrap();
        let copies = count_psub(&p).unwrap();
        assert_eq!(copies, 8);
        let gt = psub_to_gridtiling(&p).unwrap();
        assert_eq!(count_tilings(&gt).unwrap(), copies);
    }

    #[test]
    fn random_instances_parsimonious() {
        use rand::rngs::SmallRng;
        use rand::{Rng, SeedableRng};
        let mut rng = SmallRng::seed_from_u64(37);
        for _ in 0..25 {
            let k = rng.gen_range(2..=3);
            // Random colorful pattern.
            let mut pedges = BTreeSet::new();
            for a in 0..k {
                for b in a + 1..k {
                    if rng.gen_bool(0.7) {
                        pedges.insert((a, b));
                    }
                }
            }
            let pattern = ColoredGraph::new((1..=k).collect(), pedges).unwrap();
            // Random host on 2 vertices per color.
            let nh = 2 * k;
            let colors: Vec<usize> = (0..nh).map(|v| v / 2 + 1).collect();
            let mut hedges = BTreeSet::new();
            for u in 0..nh {
                for v in u + 1..nh {
                    if colors[u] != colors[v] && rng.gen_bool(0.5) {
                        hedges.insert((u, v));
                    }
                }
            }
            let host = ColoredGraph::new(colors, hedges).unwrap();
            let p = PartitionedSubInstance::new(k, pattern, host).unwrap();
            let copies = count_psub(&p).unwrap();
            let gt = psub_to_gridtiling(&p).unwrap();
            assert_eq!(count_tilings(&gt).unwrap(), copies, "instance {p:?}");
        }
    }
}
