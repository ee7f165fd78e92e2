//! Dense exact linear algebra: determinant, Pfaffian and permanent.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A dense rectangular matrix of exact scalars.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: alloc::vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
        .expect("rectangular")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_skew_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if *self.get(i, j) != -self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    fn require_square(&self, op: &str) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "{op} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }
}

/// Exact determinant by pivoted Gaussian elimination over the field of
/// Gaussian rationals.
pub fn determinant(m: &Matrix) -> Result<Scalar> {
    m.require_square("determinant")?;
    let n = m.rows;
    let mut a: Vec<Vec<Scalar>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).clone()).collect())
        .collect();
    let mut det = Scalar::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(Scalar::zero());
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det *= &pivot;
        let inv = pivot.recip()?;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] * &inv;
            for j in k..n {
                if !a[k][j].is_zero() {
                    a[i][j] = &a[i][j] - &(&f * &a[k][j]);
                }
            }
        }
    }
    Ok(det)
}

/// Exact Pfaffian of a skew-symmetric matrix of even dimension, by
/// skew-symmetric elimination. Pivots are chosen as the first nonzero
/// entry in the working column, deterministically.
pub fn pfaffian(m: &Matrix) -> Result<Scalar> {
    m.require_square("pfaffian")?;
    let n = m.rows;
    if n % 2 != 0 {
        return Err(Error::Validation(format!(
            "pfaffian needs even dimension, got {n}"
        )));
    }
    if !m.is_skew_symmetric() {
        return Err(Error::Validation("pfaffian needs a skew-symmetric matrix".into()));
    }
    let mut a: Vec<Vec<Scalar>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).clone()).collect())
        .collect();
    let mut pf = Scalar::one();
    let mut k = 0usize;
    while k < n {
        let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(Scalar::zero());
        };
        if p != k + 1 {
            // Swap row and column p <-> k+1; each pair swap flips the sign.
            a.swap(p, k + 1);
            for row in a.iter_mut() {
                row.swap(p, k + 1);
            }
            pf = -pf;
        }
        let pivot = a[k][k + 1].clone();
        pf *= &pivot;
        let inv = pivot.recip()?;
        // Schur complement on the trailing block:
        // a[i][j] += (a[k+1][i]*a[k][j] - a[k][i]*a[k+1][j]) / pivot
        for i in k + 2..n {
            let ui = a[k][i].clone();
            let vi = a[k + 1][i].clone();
            if ui.is_zero() && vi.is_zero() {
                continue;
            }
            for j in k + 2..n {
                let uj = &a[k][j];
                let vj = &a[k + 1][j];
                if uj.is_zero() && vj.is_zero() {
                    continue;
                }
                let delta = &(&(&vi * uj) - &(&ui * vj)) * &inv;
                a[i][j] = &a[i][j] + &delta;
            }
        }
        k += 2;
    }
    Ok(pf)
}

/// Exact permanent by Ryser's inclusion-exclusion over column subsets.
pub fn permanent(m: &Matrix) -> Result<Scalar> {
    m.require_square("permanent")?;
    let n = m.rows;
    if n == 0 {
        return Ok(Scalar::one());
    }
    if n > 24 {
        return Err(Error::Budget(format!("permanent of {n}x{n} matrix")));
    }
    // Gray-code walk over column subsets; row sums updated incrementally.
    let mut sums = alloc::vec![Scalar::zero(); n];
    let mut total = Scalar::zero();
    let mut prev: u64 = 0;
    for t in 1u64..(1 << n) {
        let gray = t ^ (t >> 1);
        let diff = gray ^ prev;
        let j = diff.trailing_zeros() as usize;
        if gray & diff != 0 {
            for (i, s) in sums.iter_mut().enumerate() {
                *s += m.get(i, j);
            }
        } else {
            for (i, s) in sums.iter_mut().enumerate() {
                *s -= m.get(i, j);
            }
        }
        prev = gray;
        let mut prod = Scalar::one();
        for s in &sums {
            if s.is_zero() {
                prod = Scalar::zero();
                break;
            }
            prod *= s;
        }
        if prod.is_zero() {
            continue;
        }
        let sign_flip = (n as u32 - gray.count_ones()) % 2 == 1;
        if sign_flip {
            total -= &prod;
        } else {
            total += &prod;
        }
    }
    Ok(total)
}

/// Self-test: permanent and determinant of a 0/1 matrix agree modulo 2.
pub fn perm_det_mod2_check(m: &Matrix) -> Result<bool> {
    m.require_square("perm_det_mod2_check")?;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m.get(i, j);
            if !(v.is_zero() || v.is_one()) {
                return Err(Error::Validation("entries must be 0 or 1".into()));
            }
        }
    }
    let p = permanent(m)?.to_integer().expect("integer permanent");
    let d = determinant(m)?.to_integer().expect("integer determinant");
    let two = BigInt::from(2);
    Ok(((p - d) % two).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};

    /// Independent oracle: cofactor (Laplace) expansion.
    fn det_naive(m: &Matrix) -> Scalar {
        let n = m.rows();
        if n == 0 {
            return Scalar::one();
        }
        let mut acc = Scalar::zero();
        for j in 0..n {
            if m.get(0, j).is_zero() {
                continue;
            }
            let mut sub = Matrix::zeros(n - 1, n - 1);
            for i in 1..n {
                let mut cj = 0;
                for jj in 0..n {
                    if jj == j {
                        continue;
                    }
                    sub.set(i - 1, cj, m.get(i, jj).clone());
                    cj += 1;
                }
            }
            let term = m.get(0, j) * &det_naive(&sub);
            if j % 2 == 0 {
                acc += &term;
            } else {
                acc -= &term;
            }
        }
        acc
    }

    /// Independent oracle: permutation sum.
    fn perm_naive(m: &Matrix) -> Scalar {
        fn rec(m: &Matrix, row: usize, used: &mut [bool]) -> Scalar {
            let n = m.rows();
            if row == n {
                return Scalar::one();
            }
            let mut acc = Scalar::zero();
            for j in 0..n {
                if !used[j] && !m.get(row, j).is_zero() {
                    used[j] = true;
                    acc += &(m.get(row, j) * &rec(m, row + 1, used));
                    used[j] = false;
                }
            }
            acc
        }
        let mut used = alloc::vec![false; m.rows()];
        rec(m, 0, &mut used)
    }

    fn random_int_matrix(rng: &mut SmallRng, n: usize, lo: i64, hi: i64) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, Scalar::from_int(rng.gen_range(lo..=hi)));
            }
        }
        m
    }

    fn random_skew(rng: &mut SmallRng, n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = Scalar::new(
                    Rational::new(rng.gen_range(-5..=5), rng.gen_range(1..=3)),
                    Rational::new(rng.gen_range(-2..=2), 1),
                );
                m.set(i, j, v.clone());
                m.set(j, i, -v);
            }
        }
        m
    }

    #[test]
    fn determinant_basics() {
        assert_eq!(determinant(&Matrix::identity(3)).unwrap(), Scalar::one());
        let m = Matrix::from_int_rows(&[&[0, 1], &[-1, 0]]);
        assert_eq!(determinant(&m).unwrap(), Scalar::one());
        assert!(determinant(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn determinant_matches_cofactor_oracle() {
        let mut rng = SmallRng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random_int_matrix(&mut rng, 5, -4, 4);
            assert_eq!(determinant(&m).unwrap(), det_naive(&m));
        }
    }

    #[test]
    fn pfaffian_basics() {
        let m = Matrix::from_int_rows(&[&[0, 7], &[-7, 0]]);
        assert_eq!(pfaffian(&m).unwrap(), Scalar::from_int(7));
        // Odd dimension is a precondition error, not 0.
        assert!(pfaffian(&Matrix::zeros(3, 3)).is_err());
        // Non-skew rejected.
        assert!(pfaffian(&Matrix::identity(2)).is_err());
    }

    #[test]
    fn pfaffian_4x4_textbook_expansion() {
        let mut rng = SmallRng::seed_from_u64(11);
        for _ in 0..10 {
            let m = random_skew(&mut rng, 4);
            let expect = &(&(m.get(0, 1) * m.get(2, 3)) - &(m.get(0, 2) * m.get(1, 3)))
                + &(m.get(0, 3) * m.get(1, 2));
            assert_eq!(pfaffian(&m).unwrap(), expect);
        }
    }

    #[test]
    fn pfaffian_squared_is_determinant() {
        let mut rng = SmallRng::seed_from_u64(13);
        for _ in 0..15 {
            let m = random_skew(&mut rng, 6);
            let pf = pfaffian(&m).unwrap();
            assert_eq!(&pf * &pf, determinant(&m).unwrap());
        }
    }

    #[test]
    fn permanent_basics() {
        assert_eq!(
            permanent(&Matrix::from_int_rows(&[&[1]])).unwrap(),
            Scalar::one()
        );
        let ones = Matrix::from_int_rows(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]);
        assert_eq!(permanent(&ones).unwrap(), Scalar::from_int(6));
        let m = Matrix::from_int_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(permanent(&m).unwrap(), Scalar::from_int(10));
    }

    #[test]
    fn permanent_matches_permutation_sum_exhaustively() {
        let mut rng = SmallRng::seed_from_u64(17);
        for n in 1..=6 {
            for _ in 0..6 {
                let m = random_int_matrix(&mut rng, n, -3, 3);
                assert_eq!(permanent(&m).unwrap(), perm_naive(&m));
            }
        }
    }

    #[test]
    fn perm_det_mod2() {
        assert!(perm_det_mod2_check(&Matrix::identity(4)).unwrap());
        let ones = Matrix::from_int_rows(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]);
        assert!(perm_det_mod2_check(&ones).unwrap());
        let mut rng = SmallRng::seed_from_u64(19);
        for _ in 0..50 {
            let m = random_int_matrix(&mut rng, 6, 0, 1);
            assert!(perm_det_mod2_check(&m).unwrap());
        }
    }
}
