//! Exact rational arithmetic and the special number families built on it.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Errors raised by the exact kernel.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("index k = {k} outside [-{m}, {n}]")]
    IndexOutOfRange { m: u64, n: u64, k: i64 },
    #[error("singular linear system")]
    Singular,
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn big(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `(-1)^k` as a rational.
pub fn sign_pow(k: i64) -> Rational {
    if k.is_even() {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for j in 2..=n {
        acc *= j;
    }
    acc
}

/// Integer binomial coefficient, zero outside `0 <= k <= n`.
pub fn binom_int(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

pub fn binom(n: u64, k: i64) -> Rational {
    big(binom_int(n, k))
}

pub fn harmonic(k: u64) -> Rational {
    let mut acc = Rational::zero();
    for j in 1..=k {
        acc += Rational::new(BigInt::one(), BigInt::from(j));
    }
    acc
}

fn check_range(m: u64, n: u64, k: i64) -> Result<(), ExactError> {
    if k < -(m as i64) || k > n as i64 {
        Err(ExactError::IndexOutOfRange { m, n, k })
    } else {
        Ok(())
    }
}

/// `C^{m,n}_k = m! n! / ((m+k)! (n-k)!)`.
pub fn cmn(m: u64, n: u64, k: i64) -> Result<Rational, ExactError> {
    NumberTables::new().cmn(m, n, k)
}

/// `zeta^{m,n}_k = H_{m+k} - H_{n-k}`.
pub fn zeta(m: u64, n: u64, k: i64) -> Result<Rational, ExactError> {
    NumberTables::new().zeta(m, n, k)
}

/// Growable tables of factorials and harmonic numbers.
///
/// Callers that evaluate many coefficients keep one table alive and reuse it.
#[derive(Debug, Clone)]
pub struct NumberTables {
    factorials: Vec<BigInt>,
    harmonics: Vec<Rational>,
}

impl Default for NumberTables {
    fn default() -> Self {
        Self::new()
    }
}

impl NumberTables {
    pub fn new() -> Self {
        NumberTables {
            factorials: alloc::vec![BigInt::one()],
            harmonics: alloc::vec![Rational::zero()],
        }
    }

    fn grow(&mut self, n: u64) {
        let n = n as usize;
        while self.factorials.len() <= n {
            let j = self.factorials.len();
            let next = &self.factorials[j - 1] * BigInt::from(j);
            self.factorials.push(next);
        }
        while self.harmonics.len() <= n {
            let j = self.harmonics.len();
            let next = &self.harmonics[j - 1] + Rational::new(BigInt::one(), BigInt::from(j));
            self.harmonics.push(next);
        }
    }

    pub fn factorial(&mut self, n: u64) -> BigInt {
        self.grow(n);
        self.factorials[n as usize].clone()
    }

    pub fn harmonic(&mut self, k: u64) -> Rational {
        self.grow(k);
        self.harmonics[k as usize].clone()
    }

    pub fn binom(&mut self, n: u64, k: i64) -> Rational {
        if k < 0 || k as u64 > n {
            return Rational::zero();
        }
        self.grow(n);
        let k = k as usize;
        let n = n as usize;
        big(&self.factorials[n] / (&self.factorials[k] * &self.factorials[n - k]))
    }

    pub fn cmn(&mut self, m: u64, n: u64, k: i64) -> Result<Rational, ExactError> {
        check_range(m, n, k)?;
        self.grow(m + n);
        let a = (m as i64 + k) as usize;
        let b = (n as i64 - k) as usize;
        let num = &self.factorials[m as usize] * &self.factorials[n as usize];
        let den = &self.factorials[a] * &self.factorials[b];
        Ok(Rational::new(num, den))
    }

    pub fn zeta(&mut self, m: u64, n: u64, k: i64) -> Result<Rational, ExactError> {
        check_range(m, n, k)?;
        self.grow(m + n);
        let a = (m as i64 + k) as usize;
        let b = (n as i64 - k) as usize;
        Ok(&self.harmonics[a] - &self.harmonics[b])
    }
}

/// Solves `a x = b` exactly by Gaussian elimination.
pub fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Result<Vec<Rational>, ExactError> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(ExactError::Singular);
    }
    for col in 0..n {
        let pivot = (col..n).find(|&i| !a[i][col].is_zero()).ok_or(ExactError::Singular)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for j in col..n {
            a[col][j] = &a[col][j] * &inv;
        }
        b[col] = &b[col] * &inv;
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let factor = a[i][col].clone();
            for j in col..n {
                let delta = &factor * &a[col][j];
                a[i][j] -= delta;
            }
            let delta = &factor * &b[col];
            b[i] -= delta;
        }
    }
    Ok(b)
}

/// Exact integer power of a rational with a signed exponent.
pub fn pow_i(q: &Rational, e: i64) -> Rational {
    let base = if e < 0 { q.recip() } else { q.clone() };
    let mut acc = Rational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;

    #[test]
    fn binom_examples() {
        assert_eq!(binom(6, 3), int(20));
        assert_eq!(binom(5, 7), int(0));
        assert_eq!(binom(5, -1), int(0));
        assert_eq!(binom(4, 2), int(6));
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic(0), int(0));
        assert_eq!(harmonic(1), int(1));
        assert_eq!(harmonic(3), frac(11, 6));
    }

    #[test]
    fn cmn_examples() {
        assert_eq!(cmn(2, 0, -1).unwrap(), int(2));
        assert_eq!(cmn(5, 3, 0).unwrap(), int(1));
        assert_eq!(cmn(2, 2, 1).unwrap(), frac(2, 3));
        assert!(cmn(2, 2, 3).is_err());
        assert!(cmn(2, 2, -3).is_err());
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta(2, 0, 0).unwrap(), frac(3, 2));
        assert_eq!(zeta(4, 4, 0).unwrap(), int(0));
        assert_eq!(zeta(2, 0, -1).unwrap(), int(0));
        assert!(zeta(1, 1, 2).is_err());
    }

    #[test]
    fn tables_agree_with_free_functions() {
        let mut t = NumberTables::new();
        for n in 0..20u64 {
            assert_eq!(t.factorial(n), factorial(n));
            assert_eq!(t.harmonic(n), harmonic(n));
            for k in -1..=(n as i64 + 1) {
                assert_eq!(t.binom(n, k), binom(n, k));
            }
        }
    }

    #[test]
    fn solve_small_system() {
        let a = alloc::vec![alloc::vec![int(2), int(1)], alloc::vec![int(1), int(3)]];
        let b = alloc::vec![int(3), int(5)];
        assert_eq!(solve_linear(a, b).unwrap(), alloc::vec![frac(4, 5), frac(7, 5)]);
        let singular = alloc::vec![alloc::vec![int(1), int(2)], alloc::vec![int(2), int(4)]];
        assert_eq!(
            solve_linear(singular, alloc::vec![int(1), int(1)]),
            Err(ExactError::Singular)
        );
    }

    proptest! {
        #[test]
        fn binom_symmetry(n in 0u64..60, k in 0i64..60) {
            prop_assume!(k as u64 <= n);
            prop_assert_eq!(binom(n, k), binom(n, n as i64 - k));
        }

        #[test]
        fn vandermonde(a in 0u64..20, b in 0u64..20, m in 0i64..40) {
            let lhs: Rational = (0..=m).map(|k| binom(a, k) * binom(b, m - k)).sum();
            prop_assert_eq!(lhs, binom(a + b, m));
        }

        #[test]
        fn harmonic_step(k in 1u64..80) {
            prop_assert_eq!(harmonic(k) - harmonic(k - 1), frac(1, k as i64));
        }

        #[test]
        fn cmn_factorial_identity(m in 0u64..15, n in 0u64..15, k in -15i64..15) {
            prop_assume!(k >= -(m as i64) && k <= n as i64);
            let c = cmn(m, n, k).unwrap();
            let lhs = c * big(factorial((m as i64 + k) as u64)) * big(factorial((n as i64 - k) as u64));
            prop_assert_eq!(lhs, big(factorial(m) * factorial(n)));
        }

        #[test]
        fn results_are_lowest_terms(m in 0u64..15, n in 0u64..15, k in -15i64..15) {
            prop_assume!(k >= -(m as i64) && k <= n as i64);
            for q in [cmn(m, n, k).unwrap(), zeta(m, n, k).unwrap()] {
                prop_assert!(q.numer().gcd(q.denom()).is_one() || q.numer().is_zero());
                prop_assert!(q.denom().is_positive());
            }
        }
    }
}
