//! Grid-tiling instances, brute-force counting and parity oracles, and the
//! row/column balance preprocessing.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Cells are 1-based pairs in [k]^2; values are 1-based pairs in [n]^2.
pub type Cell = (usize, usize);
pub type Pair = (usize, usize);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BalanceDirection {
    Horizontal,
    Vertical,
}

/// An instance (n, k, C, T): constraint cells C and allowed pair sets T.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GridTilingInstance {
    pub n: usize,
    pub k: usize,
    pub constraints: BTreeMap<Cell, BTreeSet<Pair>>,
}

impl GridTilingInstance {
    pub fn new(
        n: usize,
        k: usize,
        constraints: BTreeMap<Cell, BTreeSet<Pair>>,
    ) -> Result<Self> {
        for (&(i, j), set) in &constraints {
            if i == 0 || j == 0 || i > k || j > k {
                return Err(Error::Malformed(alloc::format!(
                    "constraint cell ({i},{j}) outside [{k}]^2"
                )));
            }
            for &(u, v) in set {
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(Error::Malformed(alloc::format!(
                        "pair ({u},{v}) outside [{n}]^2"
                    )));
                }
            }
        }
        Ok(GridTilingInstance { n, k, constraints })
    }

    pub fn constraint_cells(&self) -> Vec<Cell> {
        self.constraints.keys().copied().collect()
    }

    /// |T(kappa) ∩ (u, *)| for every u: the row profile of one cell set.
    fn row_counts(&self, set: &BTreeSet<Pair>) -> Vec<usize> {
        let mut c = alloc::vec![0usize; self.n + 1];
        for &(u, _) in set {
            c[u] += 1;
        }
        c
    }

    fn col_counts(&self, set: &BTreeSet<Pair>) -> Vec<usize> {
        let mut c = alloc::vec![0usize; self.n + 1];
        for &(_, v) in set {
            c[v] += 1;
        }
        c
    }

    /// Checks |T(kappa) ∩ (u,*)| = t for all kappa and u (horizontal) or
    /// the column analogue (vertical); returns the common t.
    pub fn is_balanced(&self, dir: BalanceDirection) -> Option<usize> {
        let mut t: Option<usize> = None;
        for set in self.constraints.values() {
            let counts = match dir {
                BalanceDirection::Horizontal => self.row_counts(set),
                BalanceDirection::Vertical => self.col_counts(set),
            };
            for &c in &counts[1..] {
                match t {
                    None => t = Some(c),
                    Some(x) if x == c => {}
                    Some(_) => return None,
                }
            }
        }
        if self.constraints.is_empty() {
            return Some(0);
        }
        t
    }
}

/// Exact count of grid tilings. A tiling is determined by row values
/// u_1..u_k and column values v_1..v_k with (u_i, v_j) in T(i,j) for every
/// constraint cell (i,j): horizontal adjacency pins first components along
/// rows, vertical adjacency pins second components along columns.
pub fn count_tilings(t: &GridTilingInstance) -> Result<u64> {
    let (n, k) = (t.n, t.k);
    if n == 0 || k == 0 {
        return Ok(u64::from(!t.constraints.values().any(BTreeSet::is_empty)));
    }
    let rows_total = (n as u64).checked_pow(k as u32);
    if rows_total.map_or(true, |c| c.saturating_mul((k * n * k) as u64) > 400_000_000) {
        return Err(Error::Budget(alloc::format!("count_tilings over n={n}, k={k}")));
    }
    // Enumerate row values; given them, each column contributes
    // independently.
    let mut rows = alloc::vec![1usize; k];
    let mut total = 0u64;
    loop {
        let mut prod = 1u64;
        for j in 1..=k {
            let mut count = 0u64;
            'v: for v in 1..=n {
                for i in 1..=k {
                    if let Some(set) = t.constraints.get(&(i, j)) {
                        if !set.contains(&(rows[i - 1], v)) {
                            continue 'v;
                        }
                    }
                }
                count += 1;
            }
            prod = prod.saturating_mul(count);
            if prod == 0 {
                break;
            }
        }
        total += prod;
        // Next row vector.
        let mut i = 0;
        loop {
            if i == k {
                return Ok(total);
            }
            rows[i] += 1;
            if rows[i] <= n {
                break;
            }
            rows[i] = 1;
            i += 1;
        }
    }
}

/// Reference oracle enumerating all functions a : [k]^2 -> [n]^2 directly.
/// Exponentially slower than `count_tilings`; for tests.
pub fn count_tilings_naive(t: &GridTilingInstance) -> Result<u64> {
    let (n, k) = (t.n, t.k);
    let cells = k * k;
    let states = (n * n) as u64;
    if states.checked_pow(cells as u32).map_or(true, |c| c > 100_000_000) {
        return Err(Error::Budget("naive tiling enumeration".into()));
    }
    let mut assignment = alloc::vec![(1usize, 1usize); cells];
    let idx = |i: usize, j: usize| (i - 1) * k + (j - 1);
    let mut total = 0u64;
    'outer: loop {
        'check: {
            for i in 1..=k {
                for j in 1..=k {
                    let (u, v) = assignment[idx(i, j)];
                    if j < k && assignment[idx(i, j + 1)].0 != u {
                        break 'check;
                    }
                    if i < k && assignment[idx(i + 1, j)].1 != v {
                        break 'check;
                    }
                    if let Some(set) = t.constraints.get(&(i, j)) {
                        if !set.contains(&(u, v)) {
                            break 'check;
                        }
                    }
                }
            }
            total += 1;
        }
        // Advance the assignment vector.
        for c in 0..cells {
            let (mut u, mut v) = assignment[c];
            v += 1;
            if v > n {
                v = 1;
                u += 1;
            }
            if u <= n {
                assignment[c] = (u, v);
                continue 'outer;
            }
            assignment[c] = (1, 1);
        }
        return Ok(total);
    }
}

pub fn parity_tilings(t: &GridTilingInstance) -> Result<bool> {
    Ok(count_tilings(t)? % 2 == 1)
}

/// Balance preprocessing: pads every constraint set with dummy elements in
/// fresh per-cell index blocks so that all rows (horizontal) or columns
/// (vertical) of every T(kappa), over the enlarged index range, have the
/// same cardinality T. Dummy row values (vertical) or column values
/// (horizontal) are distinct across cells and lie outside [n], so dummies
/// cannot take part in any tiling as long as every cell-grid row
/// (vertical) or column (horizontal) containing a constraint cell contains
/// at least two of them; the balanced instance then has precisely the same
/// grid tilings.
pub fn balance(
    t: &GridTilingInstance,
    dir: BalanceDirection,
) -> Result<(GridTilingInstance, usize)> {
    let (n, k) = (t.n, t.k);
    // An already-balanced instance passes through unchanged.
    if let Some(cap) = t.is_balanced(dir) {
        return Ok((t.clone(), cap));
    }
    // T = max line cardinality over cells.
    let mut cap = 0usize;
    for set in t.constraints.values() {
        let counts = match dir {
            BalanceDirection::Horizontal => t.row_counts(set),
            BalanceDirection::Vertical => t.col_counts(set),
        };
        cap = cap.max(counts[1..].iter().copied().max().unwrap_or(0));
    }
    let n_new = n + k * k * cap;
    let block_start = |i: usize, j: usize| n + ((i - 1) * k + (j - 1)) * cap;
    let mut constraints = t.constraints.clone();
    for (&(i, j), set) in constraints.iter_mut() {
        let mut counts = alloc::vec![0usize; n + 1];
        for &(u, v) in set.iter() {
            let line = match dir {
                BalanceDirection::Horizontal => u,
                BalanceDirection::Vertical => v,
            };
            counts[line] += 1;
        }
        let base = block_start(i, j);
        // Original lines are padded up to `cap` with the lexicographically
        // first dummies of this cell's block, then dummy lines are filled
        // to exactly `cap` so the enlarged instance is balanced throughout.
        for line in 1..=n_new {
            let have = if line <= n { counts[line] } else { 0 };
            for f in 0..cap - have {
                let dummy = base + f + 1;
                match dir {
                    BalanceDirection::Horizontal => set.insert((line, dummy)),
                    BalanceDirection::Vertical => set.insert((dummy, line)),
                };
            }
        }
    }
    let out = GridTilingInstance::new(n_new, k, constraints)?;
    debug_assert_eq!(out.is_balanced(dir), Some(cap));
    Ok((out, cap))
}
