//! Arithmetic in the rings Z/2^m. Addition, subtraction and multiplication
//! only; the mod-2^k pipeline is arranged so that no division is ever
//! needed in these rings.

use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

/// A residue modulo `2^modulus_log`, kept reduced.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModScalar {
    value: BigUint,
    modulus_log: u32,
}

impl ModScalar {
    pub fn new(value: BigUint, modulus_log: u32) -> Self {
        assert!(modulus_log > 0, "modulus 2^0 is trivial");
        let m = BigUint::from(1u8) << modulus_log;
        ModScalar { value: value % m, modulus_log }
    }

    /// Reduces an arbitrary (possibly negative) integer.
    pub fn from_bigint(n: &BigInt, modulus_log: u32) -> Self {
        assert!(modulus_log > 0, "modulus 2^0 is trivial");
        let m = BigInt::from(1) << modulus_log;
        let mut r = n % &m;
        if r < BigInt::zero() {
            r += &m;
        }
        ModScalar { value: r.to_biguint().expect("reduced residue"), modulus_log }
    }

    pub fn from_u64(n: u64, modulus_log: u32) -> Self {
        ModScalar::new(BigUint::from(n), modulus_log)
    }

    pub fn zero(modulus_log: u32) -> Self {
        ModScalar::new(BigUint::zero(), modulus_log)
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus_log(&self) -> u32 {
        self.modulus_log
    }

    pub fn modulus(&self) -> BigUint {
        BigUint::from(1u8) << self.modulus_log
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn check(&self, o: &ModScalar) {
        assert_eq!(
            self.modulus_log, o.modulus_log,
            "mixed moduli in Z/2^m arithmetic"
        );
    }

    pub fn add(&self, o: &ModScalar) -> ModScalar {
        self.check(o);
        ModScalar::new(&self.value + &o.value, self.modulus_log)
    }

    pub fn sub(&self, o: &ModScalar) -> ModScalar {
        self.check(o);
        ModScalar::new(&self.value + self.modulus() - &o.value, self.modulus_log)
    }

    pub fn mul(&self, o: &ModScalar) -> ModScalar {
        self.check(o);
        ModScalar::new(&self.value * &o.value, self.modulus_log)
    }

    pub fn neg(&self) -> ModScalar {
        ModScalar::zero(self.modulus_log).sub(self)
    }

    pub fn pow(&self, mut e: u64) -> ModScalar {
        let mut base = self.clone();
        let mut acc = ModScalar::new(BigUint::from(1u8), self.modulus_log);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for ModScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod 2^{})", self.value, self.modulus_log)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_basics() {
        let a = ModScalar::from_u64(5, 3);
        let b = ModScalar::from_u64(6, 3);
        assert_eq!(a.add(&b), ModScalar::from_u64(3, 3));
        assert_eq!(a.mul(&ModScalar::from_u64(3, 3)), ModScalar::from_u64(7, 3));
        assert_eq!(ModScalar::from_u64(2, 3).pow(3), ModScalar::zero(3));
    }

    #[test]
    fn negative_reduction() {
        let n = BigInt::from(-3);
        assert_eq!(ModScalar::from_bigint(&n, 3), ModScalar::from_u64(5, 3));
        let m = BigInt::from(-16);
        assert_eq!(ModScalar::from_bigint(&m, 3), ModScalar::zero(3));
    }

    #[test]
    fn associativity_distributivity_random() {
        // Small deterministic pseudo-random triples.
        let mut x = 0x12345u64;
        let mut next = move || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            x >> 33
        };
        for _ in 0..50 {
            let (a, b, c) = (
                ModScalar::from_u64(next(), 7),
                ModScalar::from_u64(next(), 7),
                ModScalar::from_u64(next(), 7),
            );
            assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }
    }
}
