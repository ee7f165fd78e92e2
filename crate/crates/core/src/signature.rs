//! Vertex signatures: dense tables, the named builtin signatures used by
//! the matchgate constructions, and the lazily evaluated cell signatures
//! of arity 4n.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::bits::{self, index_of, one_hot_position};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The named signatures. `HwEq1` is the perfect-matching signature; `Pass`,
/// `Pre` and `Act` are the crossing signatures of arity 4 and 6; `Even` and
/// `Odd` are the parity indicators.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Builtin {
    HwEq0,
    HwEq1,
    Pass,
    Pre,
    Act,
    Even,
    Odd,
}

impl Builtin {
    /// Fixed arity, if the builtin has one (Pass: 4, Pre/Act: 6).
    pub fn fixed_arity(self) -> Option<usize> {
        match self {
            Builtin::Pass => Some(4),
            Builtin::Pre | Builtin::Act => Some(6),
            _ => None,
        }
    }
}

/// PASS on (N, E, S, W): 1 on {0000, 0101, 1010}, -1 on 1111, 0 otherwise.
fn pass_value(x: &[bool]) -> Scalar {
    let (n, e, s, w) = (x[0], x[1], x[2], x[3]);
    if n != s || e != w {
        return Scalar::zero();
    }
    if n && e {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

/// PRE on (N, E, S, W, 5, 6); the last two bits are the apex switches.
fn pre_value(x: &[bool]) -> Scalar {
    let (n, e, s, w) = (x[0], x[1], x[2], x[3]);
    let (y5, y6) = (x[4], x[5]);
    match (y5, y6) {
        (false, false) => pass_value(&x[..4]),
        // Both switches active: vertical line forced, horizontal free.
        (true, true) => {
            if n && s && e == w {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        }
        // Switch 6 only: northern ray (N active, S inactive).
        (false, true) => {
            if n && !s && e == w {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        }
        // Switch 5 only: southern ray.
        (true, false) => {
            if !n && s && e == w {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        }
    }
}

/// ACT on (N, E, S, W, 5, 6): like PRE but the single-switch rays vanish.
fn act_value(x: &[bool]) -> Scalar {
    let (n, e, s, w) = (x[0], x[1], x[2], x[3]);
    let (y5, y6) = (x[4], x[5]);
    match (y5, y6) {
        (false, false) => pass_value(&x[..4]),
        (true, true) => {
            if n && s && e == w {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        }
        _ => Scalar::zero(),
    }
}

/// The two lazily evaluated cell-signature rules of arity `4n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CellKind {
    /// Propagates the western one-hot index east and the northern one south.
    Propagate,
    /// Propagates and additionally checks `(west, north)` membership in a
    /// constraint set of index pairs (1-based).
    PropagateCheck(BTreeSet<(usize, usize)>),
}

/// A cell signature of arity `4n`, evaluated by rule instead of by table.
/// Outside inputs with one-hot northern and western blocks the value is
/// fixed to 0 (border forcing makes the choice invisible in any Holant).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CellSignature {
    pub n: usize,
    pub kind: CellKind,
}

impl CellSignature {
    pub fn arity(&self) -> usize {
        4 * self.n
    }

    /// Decomposes `x = x_N x_E x_S x_W` into the four blocks.
    pub fn blocks<'a>(&self, x: &'a [bool]) -> (&'a [bool], &'a [bool], &'a [bool], &'a [bool]) {
        let n = self.n;
        (&x[..n], &x[n..2 * n], &x[2 * n..3 * n], &x[3 * n..])
    }

    pub fn eval(&self, x: &[bool]) -> Scalar {
        let (xn, xe, xs, xw) = self.blocks(x);
        // phi_one: both the northern and the western block are one-hot.
        let (Some(v), Some(u)) = (one_hot_position(xn), one_hot_position(xw)) else {
            return Scalar::zero();
        };
        // phi_prop: north equals south and west equals east.
        if xn != xs || xw != xe {
            return Scalar::zero();
        }
        match &self.kind {
            CellKind::Propagate => Scalar::one(),
            CellKind::PropagateCheck(set) => {
                if set.contains(&(u + 1, v + 1)) {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            }
        }
    }
}

/// A vertex function {0,1}^arity -> Scalar.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Signature {
    Dense { arity: usize, table: Vec<Scalar> },
    Builtin { kind: Builtin, arity: usize },
    Lazy(CellSignature),
}

impl Signature {
    pub fn dense(arity: usize, table: Vec<Scalar>) -> Result<Self> {
        if table.len() != 1 << arity {
            return Err(Error::Malformed(alloc::format!(
                "dense table of arity {arity} needs {} entries, got {}",
                1usize << arity,
                table.len()
            )));
        }
        Ok(Signature::Dense { arity, table })
    }

    pub fn builtin(kind: Builtin, arity: usize) -> Result<Self> {
        if let Some(fixed) = kind.fixed_arity() {
            if fixed != arity {
                return Err(Error::Arity { expected: fixed, got: arity });
            }
        }
        Ok(Signature::Builtin { kind, arity })
    }

    pub fn hw1(arity: usize) -> Self {
        Signature::Builtin { kind: Builtin::HwEq1, arity }
    }

    pub fn pass() -> Self {
        Signature::Builtin { kind: Builtin::Pass, arity: 4 }
    }

    pub fn pre() -> Self {
        Signature::Builtin { kind: Builtin::Pre, arity: 6 }
    }

    pub fn act() -> Self {
        Signature::Builtin { kind: Builtin::Act, arity: 6 }
    }

    pub fn arity(&self) -> usize {
        match self {
            Signature::Dense { arity, .. } => *arity,
            Signature::Builtin { arity, .. } => *arity,
            Signature::Lazy(c) => c.arity(),
        }
    }

    /// Evaluates the signature; bit `i` of `x` is the `i`-th incident edge.
    pub fn eval(&self, x: &[bool]) -> Result<Scalar> {
        if x.len() != self.arity() {
            return Err(Error::Arity { expected: self.arity(), got: x.len() });
        }
        Ok(match self {
            Signature::Dense { table, .. } => table[index_of(x)].clone(),
            Signature::Builtin { kind, .. } => match kind {
                Builtin::HwEq0 => bool_scalar(bits::hw(x) == 0),
                Builtin::HwEq1 => bool_scalar(bits::hw(x) == 1),
                Builtin::Pass => pass_value(x),
                Builtin::Pre => pre_value(x),
                Builtin::Act => act_value(x),
                Builtin::Even => bool_scalar(bits::hw(x) % 2 == 0),
                Builtin::Odd => bool_scalar(bits::hw(x) % 2 == 1),
            },
            Signature::Lazy(c) => c.eval(x),
        })
    }

    /// The full table of the signature, in big-endian index order.
    pub fn to_table(&self) -> Vec<Scalar> {
        let d = self.arity();
        (0..1usize << d)
            .map(|idx| self.eval(&bits::bits_of(idx, d)).expect("arity checked"))
            .collect()
    }

    /// The support as (bits, value) pairs. Enumeration-friendly: builtins
    /// and cell signatures produce their few support elements directly
    /// instead of scanning 2^arity inputs.
    pub fn support(&self) -> Vec<(Vec<bool>, Scalar)> {
        let d = self.arity();
        let one = Scalar::one();
        match self {
            Signature::Dense { table, .. } => (0..table.len())
                .filter(|&i| !table[i].is_zero())
                .map(|i| (bits::bits_of(i, d), table[i].clone()))
                .collect(),
            Signature::Builtin { kind, .. } => match kind {
                Builtin::HwEq0 => alloc::vec![(alloc::vec![false; d], one)],
                Builtin::HwEq1 => (0..d)
                    .map(|i| {
                        let mut b = alloc::vec![false; d];
                        b[i] = true;
                        (b, one.clone())
                    })
                    .collect(),
                Builtin::Pass | Builtin::Pre | Builtin::Act | Builtin::Even | Builtin::Odd => {
                    (0..1usize << d)
                        .filter_map(|i| {
                            let b = bits::bits_of(i, d);
                            let v = self.eval(&b).expect("arity checked");
                            (!v.is_zero()).then_some((b, v))
                        })
                        .collect()
                }
            },
            Signature::Lazy(c) => {
                // phi_one and phi_prop pin everything except the choice of
                // the two one-hot positions.
                let n = c.n;
                let mut out = Vec::new();
                for u in 0..n {
                    for v in 0..n {
                        if let CellKind::PropagateCheck(set) = &c.kind {
                            if !set.contains(&(u + 1, v + 1)) {
                                continue;
                            }
                        }
                        let mut b = alloc::vec![false; 4 * n];
                        b[v] = true; // north
                        b[n + u] = true; // east
                        b[2 * n + v] = true; // south
                        b[3 * n + u] = true; // west
                        out.push((b, one.clone()));
                    }
                }
                out
            }
        }
    }
}

fn bool_scalar(b: bool) -> Scalar {
    if b {
        Scalar::one()
    } else {
        Scalar::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits_of;

    fn eval_bits(sig: &Signature, s: &str) -> Scalar {
        let x: Vec<bool> = s.chars().map(|c| c == '1').collect();
        sig.eval(&x).unwrap()
    }

    #[test]
    fn pass_table() {
        let p = Signature::pass();
        assert_eq!(eval_bits(&p, "1111"), -Scalar::one());
        assert_eq!(eval_bits(&p, "1010"), Scalar::one());
        assert_eq!(eval_bits(&p, "0101"), Scalar::one());
        assert_eq!(eval_bits(&p, "0000"), Scalar::one());
        assert_eq!(eval_bits(&p, "1000"), Scalar::zero());
        assert_eq!(eval_bits(&p, "1100"), Scalar::zero());
    }

    #[test]
    fn act_table() {
        let a = Signature::act();
        assert_eq!(eval_bits(&a, "101011"), Scalar::one());
        assert_eq!(eval_bits(&a, "111111"), Scalar::one());
        assert_eq!(eval_bits(&a, "101001"), Scalar::zero());
        assert_eq!(eval_bits(&a, "101010"), Scalar::zero());
        // ACT(x00) = PASS(x).
        for idx in 0..16 {
            let x = bits_of(idx, 4);
            let mut x6 = x.clone();
            x6.extend([false, false]);
            assert_eq!(a.eval(&x6).unwrap(), Signature::pass().eval(&x).unwrap());
        }
    }

    #[test]
    fn pre_table() {
        let p = Signature::pre();
        assert_eq!(eval_bits(&p, "100001"), Scalar::one()); // N 01
        assert_eq!(eval_bits(&p, "110101"), Scalar::one()); // NWE 01
        assert_eq!(eval_bits(&p, "001010"), Scalar::one()); // S 10
        assert_eq!(eval_bits(&p, "011110"), Scalar::one()); // SWE 10
        assert_eq!(eval_bits(&p, "100010"), Scalar::zero());
        assert_eq!(eval_bits(&p, "101011"), Scalar::one());
        assert_eq!(eval_bits(&p, "111111"), Scalar::one());
        for idx in 0..16 {
            let x = bits_of(idx, 4);
            let mut x6 = x.clone();
            x6.extend([false, false]);
            assert_eq!(p.eval(&x6).unwrap(), Signature::pass().eval(&x).unwrap());
        }
    }

    #[test]
    fn cell_signature_propagate() {
        let f = CellSignature { n: 2, kind: CellKind::Propagate };
        // x_N=01, x_E=10, x_S=01, x_W=10: propagating, value 1.
        let x: Vec<bool> = [0, 1, 1, 0, 0, 1, 1, 0].iter().map(|&b| b == 1).collect();
        assert_eq!(f.eval(&x), Scalar::one());
        // Mismatched east block: 0.
        let y: Vec<bool> = [0, 1, 0, 1, 0, 1, 1, 0].iter().map(|&b| b == 1).collect();
        assert_eq!(f.eval(&y), Scalar::zero());
        // Outside phi_one: fixed to 0.
        let z = alloc::vec![false; 8];
        assert_eq!(f.eval(&z), Scalar::zero());
    }

    #[test]
    fn cell_signature_check() {
        let set: BTreeSet<(usize, usize)> = [(1, 2)].into_iter().collect();
        let g = CellSignature { n: 2, kind: CellKind::PropagateCheck(set) };
        // u = west one-hot position 1, v = north one-hot position 2.
        let x: Vec<bool> = [0, 1, 1, 0, 0, 1, 1, 0].iter().map(|&b| b == 1).collect();
        assert_eq!(g.eval(&x), Scalar::one());
        // (2, 1) is not in the set.
        let y: Vec<bool> = [1, 0, 0, 1, 1, 0, 0, 1].iter().map(|&b| b == 1).collect();
        assert_eq!(g.eval(&y), Scalar::zero());
    }
}
