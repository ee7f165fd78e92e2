//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.
//!
//! `Scalar` is the universal value domain of the crate: edge weights,
//! signature values, Holants, Pfaffians and permanents are all `Scalar`s.
//! Values are always kept in reduced form, so equality is structural.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An exact rational number, always reduced, denominator always positive.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    /// `num / den`, reduced. `den` must be nonzero.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn new_big(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Malformed("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// The integer value, if the rational is integral.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Validation("division by zero".into()));
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Canonical text form `p/q`, with `/q` omitted for integers.
    pub fn to_decimal_string(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            let mut s = self.numer().to_string();
            s.push('/');
            s.push_str(&self.denom().to_string());
            s
        }
    }

    /// Parses `p` or `p/q` (decimal, optional leading `-`).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Malformed(alloc::format!("not a rational: {s:?}"));
        let parse_int = |t: &str| t.parse::<BigInt>().map_err(|_| bad());
        match s.split_once('/') {
            None => Ok(Rational(BigRational::from_integer(parse_int(s)?))),
            Some((p, q)) => {
                let num = parse_int(p)?;
                let den = parse_int(q)?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(Rational(BigRational::new(num, den)))
            }
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// An exact Gaussian rational `re + im·i`. The field operations are exact;
/// equality is structural on the reduced components.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    pub re: Rational,
    pub im: Rational,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { re: Rational::zero(), im: Rational::zero() }
    }

    pub fn one() -> Self {
        Scalar { re: Rational::one(), im: Rational::zero() }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar { re: Rational::zero(), im: Rational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { re: Rational::from_int(n), im: Rational::zero() }
    }

    pub fn from_rational(re: Rational) -> Self {
        Scalar { re, im: Rational::zero() }
    }

    pub fn new(re: Rational, im: Rational) -> Self {
        Scalar { re, im }
    }

    /// `num/den` as a real scalar.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::from_rational(Rational::new(num, den))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// The integer value, if the scalar is a rational integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        if !self.im.is_zero() {
            return None;
        }
        self.re.to_integer()
    }

    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: -&self.im }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Validation("division by zero".into()));
        }
        // 1/(a+bi) = (a-bi)/(a^2+b^2)
        let n = &(&self.re * &self.re) + &(&self.im * &self.im);
        let inv = n.recip()?;
        Ok(Scalar { re: &self.re * &inv, im: -&(&self.im * &inv) })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Canonical text form: `p/q` when real, otherwise `re+im*i` with zero
    /// real part elided.
    pub fn to_display_string(&self) -> String {
        if self.im.is_zero() {
            return self.re.to_decimal_string();
        }
        let im = alloc::format!("{}*i", self.im.to_decimal_string());
        if self.re.is_zero() {
            im
        } else if self.im.is_negative() {
            alloc::format!("{}{}", self.re.to_decimal_string(), im)
        } else {
            alloc::format!("{}+{}", self.re.to_decimal_string(), im)
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_display_string())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        Scalar { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        Scalar { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        (&self).mul(&o)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        Scalar {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, o: Scalar) -> Scalar {
        (&self).div(&o)
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use `recip` for a checked path.
    fn div(self, o: &Scalar) -> Scalar {
        self * &o.recip().expect("Scalar division by zero")
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, im: -self.im }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -&self.re, im: -&self.im }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = &*self + o;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        *self = &*self - o;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

/// Product of a slice of scalars.
pub fn product(xs: &[Scalar]) -> Scalar {
    let mut acc = Scalar::one();
    for x in xs {
        acc *= x;
    }
    acc
}

/// Sum of an iterator of scalars.
pub fn sum<I: IntoIterator<Item = Scalar>>(xs: I) -> Scalar {
    let mut acc = Scalar::zero();
    for x in xs {
        acc += &x;
    }
    acc
}

/// Exact Gaussian elimination solve of `A c = b` over `Scalar`.
///
/// `a` is row-major with `rows x cols` entries. Returns any solution if the
/// system is consistent (free variables are set to zero), `None` otherwise.
pub fn solve_linear_system(
    a: &[Vec<Scalar>],
    b: &[Scalar],
) -> Option<Vec<Scalar>> {
    let rows = a.len();
    if rows == 0 {
        return Some(Vec::new());
    }
    let cols = a[0].len();
    let mut m: Vec<Vec<Scalar>> = a.to_vec();
    let mut rhs: Vec<Scalar> = b.to_vec();
    let mut pivot_col_of_row = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        rhs.swap(r, p);
        let inv = m[r][c].recip().ok()?;
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        rhs[r] = &rhs[r] * &inv;
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    m[i][j] = &m[i][j] - &(&f * &m[r][j]);
                }
                rhs[i] = &rhs[i] - &(&f * &rhs[r]);
            }
        }
        pivot_col_of_row.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    // Inconsistent if a zero row has nonzero rhs.
    for i in r..rows {
        if !rhs[i].is_zero() {
            return None;
        }
    }
    let mut sol = alloc::vec![Scalar::zero(); cols];
    for (row, &c) in pivot_col_of_row.iter().enumerate() {
        sol[c] = rhs[row].clone();
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_reduction_and_parse() {
        let r = Rational::new(6, -4);
        assert_eq!(r.to_decimal_string(), "-3/2");
        assert_eq!(Rational::parse("-3/2").unwrap(), r);
        assert_eq!(Rational::parse("7").unwrap(), Rational::from_int(7));
        assert!(Rational::parse("1/0").is_err());
        assert!(Rational::parse("x").is_err());
        assert_eq!(Rational::new(0, 5), Rational::zero());
    }

    #[test]
    fn scalar_field_ops() {
        let a = Scalar::new(Rational::new(1, 2), Rational::new(-1, 3));
        let b = Scalar::new(Rational::new(2, 5), Rational::from_int(4));
        let prod = &a * &b;
        let back = &prod / &b;
        assert_eq!(back, a);
        assert_eq!(&a - &a, Scalar::zero());
        assert_eq!(Scalar::i().pow(4), Scalar::one());
        assert_eq!(Scalar::i().pow(2), -Scalar::one());
    }

    #[test]
    fn scalar_display() {
        assert_eq!(Scalar::ratio(-3, 2).to_display_string(), "-3/2");
        let z = Scalar::new(Rational::from_int(1), Rational::new(1, 2));
        assert_eq!(z.to_display_string(), "1+1/2*i");
        assert_eq!(Scalar::i().to_display_string(), "1*i");
        let w = Scalar::new(Rational::from_int(2), Rational::from_int(-1));
        assert_eq!(w.to_display_string(), "2-1*i");
    }

    #[test]
    fn cross_cap_coefficients_sum_to_expected() {
        // (1-i)/2 * i^h + (1+i)/2 * (-i)^h over h = 0..7 is 1,1,-1,-1,...
        let c1 = &(&Scalar::one() - &Scalar::i()) * &Scalar::ratio(1, 2);
        let c2 = &(&Scalar::one() + &Scalar::i()) * &Scalar::ratio(1, 2);
        for h in 0u64..8 {
            let v = &(&c1 * &Scalar::i().pow(h)) + &(&c2 * &(-Scalar::i()).pow(h));
            let want = if (h / 2) % 2 == 0 { Scalar::one() } else { -Scalar::one() };
            assert_eq!(v, want, "h={h}");
        }
    }

    #[test]
    fn linear_solve_small() {
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let a = vec![
            vec![Scalar::one(), Scalar::one()],
            vec![Scalar::one(), -Scalar::one()],
        ];
        let b = vec![Scalar::from_int(3), Scalar::from_int(1)];
        let sol = solve_linear_system(&a, &b).unwrap();
        assert_eq!(sol, vec![Scalar::from_int(2), Scalar::from_int(1)]);
        // Underdetermined: free variables pinned to zero.
        let b2 = vec![Scalar::from_int(3), Scalar::from_int(3)];
        let a2 = vec![
            vec![Scalar::one(), Scalar::one()],
            vec![Scalar::one(), Scalar::one()],
        ];
        let sol2 = solve_linear_system(&a2, &b2).unwrap();
        assert_eq!(sol2, vec![Scalar::from_int(3), Scalar::zero()]);
        let b3 = vec![Scalar::from_int(3), Scalar::from_int(4)];
        assert!(solve_linear_system(&a2, &b3).is_none());
    }
}
