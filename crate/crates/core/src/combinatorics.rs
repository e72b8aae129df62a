//! Binomial cosine series, q-coefficient families and the exact evaluation of `Re H(π)`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ddo::{node_weights, IndexQuad};
use crate::exactnum::{big, binom, factorial, int, sign_pow, to_f64, NumberTables, Rational};
use crate::trigpoly::{split_complex, to_cos_poly, Poly, TrigPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CombError {
    #[error("item {0} outside 1..=8")]
    UnknownItem(u32),
    #[error("m = {0} must be odd")]
    EvenM(u64),
    #[error("m must be positive")]
    ZeroM,
}

/// `C_{m,n}(θ) = Σ_k binom(m, n+k) binom(m, n-k) cos kθ`.
pub fn cfun(m: u64, n: i64) -> TrigPoly {
    cfun3(m, m, n, Kind::C)
}

/// The three-index series. `C`/`S` pair `binom(m1, n+k)` with `binom(m2, n-k)`;
/// `LowerC`/`LowerS` pair it with `binom(m2, n+1-k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    C,
    S,
    LowerC,
    LowerS,
}

pub fn cfun3(m1: u64, m2: u64, n: i64, kind: Kind) -> TrigPoly {
    let shift = match kind {
        Kind::C | Kind::S => 0,
        Kind::LowerC | Kind::LowerS => 1,
    };
    let mut out = TrigPoly::zero();
    for k in -n..=(m1 as i64 - n) {
        let w = binom(m1, n + k) * binom(m2, n + shift - k);
        if w.is_zero() {
            continue;
        }
        let a = k.unsigned_abs() as u32;
        match kind {
            Kind::C | Kind::LowerC => out.add_cos(a, w),
            Kind::S | Kind::LowerS => out.add_sin(a, if k < 0 { -w } else { w }),
        }
    }
    out
}

/// Checks the three first-derivative identities linking the `C`, `S`, `c`, `s` series.
pub fn cfun3_derivative_check(m1: u64, m2: u64, n: i64) -> bool {
    let (a, b) = (int(m1 as i64), int(n));
    let c_prime = &cfun3(m1 - 1, m2, n - 1, Kind::LowerS).scale(&-a.clone()) + &cfun3(m1, m2, n, Kind::S).scale(&b);
    let s_prime = &cfun3(m1 - 1, m2, n - 1, Kind::LowerC).scale(&a) - &cfun3(m1, m2, n, Kind::C).scale(&b);
    let ls_prime =
        &cfun3(m1, m2, n, Kind::LowerC).scale(&int(n + 1)) - &cfun3(m1, m2 - 1, n, Kind::C).scale(&int(m2 as i64));
    cfun3(m1, m2, n, Kind::C).derivative(1) == c_prime
        && cfun3(m1, m2, n, Kind::S).derivative(1) == s_prime
        && cfun3(m1, m2, n, Kind::LowerS).derivative(1) == ls_prime
}

fn pow(p: &Poly, e: u64) -> Poly {
    (0..e).fold(Poly::one(), |acc, _| &acc * p)
}

/// The half-angle form of `C_{m,n}` as a polynomial in `x = cos θ`.
pub fn cfun_half_angle(m: u64, n: u64) -> Poly {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let sin2 = Poly::new(alloc::vec![half.clone(), -half.clone()]);
    let cos2 = Poly::new(alloc::vec![half.clone(), half]);
    let mut out = Poly::zero();
    for k in n..=m {
        let w = binom(m, (m - k) as i64) * binom(2 * k, 2 * n as i64);
        out = &out + &(&pow(&sin2, m - k) * &pow(&cos2, k - n)).scale(&w);
    }
    out
}

/// Compares `C_{m,n}` with its half-angle form exactly and at the given angles.
pub fn cfun_alt_check(m: u64, n: u64, theta_samples: &[f64]) -> bool {
    let direct = cfun(m, n as i64);
    let alt = cfun_half_angle(m, n);
    let exact = to_cos_poly(&direct).map(|p| p == alt).unwrap_or(false);
    let sampled = theta_samples.iter().all(|&th| {
        let s2 = libm::pow(libm::sin(th / 2.0), 2.0);
        let c2 = libm::pow(libm::cos(th / 2.0), 2.0);
        let v: f64 = (n..=m)
            .map(|k| {
                to_f64(&(binom(m, (m - k) as i64) * binom(2 * k, 2 * n as i64)))
                    * libm::pow(s2, (m - k) as f64)
                    * libm::pow(c2, (k - n) as f64)
            })
            .sum();
        let d = direct.eval(th);
        (v - d).abs() <= 1e-10 * d.abs().max(1.0)
    });
    exact && sampled
}

/// `m^2 C_{m-1,n-1} - n^2 C_{m,n}`.
pub fn cfun_second_derivative(m: u64, n: u64) -> TrigPoly {
    &cfun(m - 1, n as i64 - 1).scale(&int((m * m) as i64)) - &cfun(m, n as i64).scale(&int((n * n) as i64))
}

/// `P_{t,m}(x) = (x + t + 1)(x + t + 2)...(x + t + m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RisingPoly {
    pub t: u64,
    pub m: u64,
    pub poly: Poly,
}

impl RisingPoly {
    pub fn new(t: u64, m: u64) -> Self {
        let poly = (1..=m).fold(Poly::one(), |acc, j| &acc * &Poly::from_ints(&[(t + j) as i64, 1]));
        RisingPoly { t, m, poly }
    }
}

fn reflect(p: &Poly) -> Poly {
    Poly::new(
        p.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
            .collect(),
    )
}

/// The four stencil parities with a q-coefficient representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Sym,
    Check,
    Hat,
    Tilde,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Sym, Family::Check, Family::Hat, Family::Tilde];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Sym => "sym",
            Family::Check => "check",
            Family::Hat => "hat",
            Family::Tilde => "tilde",
        }
    }

    /// The `(l, r, l', r')` quadruple the family describes.
    pub fn quad(&self, t: u32, m: u32) -> IndexQuad {
        match self {
            Family::Sym => IndexQuad::new(t + m, t, t + m, t),
            Family::Check => IndexQuad::new(t + m + 1, t + 1, t + m, t),
            Family::Hat => IndexQuad::new(t + m + 1, t, t + m, t),
            Family::Tilde => IndexQuad::new(t + m + 2, t + 1, t + m, t),
        }
    }

    /// Indices `(M, N)` of the series `C_{M,N}` in the representation.
    pub fn cfun_indices(&self, t: u64, m: u64) -> (u64, u64) {
        match self {
            Family::Sym => (2 * t + 2 * m, t + m),
            Family::Check | Family::Hat => (2 * t + 2 * m + 1, t + m),
            Family::Tilde => (2 * t + 2 * m + 2, t + m),
        }
    }

    fn factors(&self, t: u64, m: u64) -> (RisingPoly, RisingPoly, Rational) {
        let f = |n| big(factorial(n));
        match self {
            Family::Sym => {
                let p = RisingPoly::new(t, m);
                let pre = f(t + m) * f(t + m) / (f(t) * f(t));
                (p.clone(), p, pre)
            }
            Family::Check => {
                let pre = f(t + m + 1) * f(t + m) / (f(t + 1) * f(t));
                (RisingPoly::new(t + 1, m), RisingPoly::new(t, m), pre)
            }
            Family::Hat => {
                let pre = f(t + m + 1) * f(t + m) / (f(t) * f(t));
                (RisingPoly::new(t, m + 1), RisingPoly::new(t, m), pre)
            }
            Family::Tilde => {
                let pre = f(t + m + 2) * f(t + m) / (f(t + 1) * f(t));
                (RisingPoly::new(t + 1, m + 1), RisingPoly::new(t, m), pre)
            }
        }
    }
}

/// Even coefficients of `Q(x)/x` divided by the family's factorial prefactor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QFamily {
    pub family: Family,
    pub t: u64,
    pub m: u64,
    pub coeffs: Vec<Rational>,
}

impl QFamily {
    /// `binom(M, N)^{-2} Σ_j (-1)^j q_j C^{(2j)}_{M,N}`.
    pub fn representation(&self) -> TrigPoly {
        let (mm, nn) = self.family.cfun_indices(self.t, self.m);
        let c = cfun(mm, nn as i64);
        let mut out = TrigPoly::zero();
        for (j, q) in self.coeffs.iter().enumerate() {
            out = &out + &c.derivative(2 * j as u32).scale(&(q * sign_pow(j as i64)));
        }
        let b = binom(mm, nn as i64);
        out.scale(&(&b * &b).recip())
    }
}

pub fn qcoeffs(family: Family, t: u64, m: u64) -> Result<QFamily, CombError> {
    if m == 0 {
        return Err(CombError::ZeroM);
    }
    let (a, b, pre) = family.factors(t, m);
    let q = &(&a.poly * &b.poly) - &(&reflect(&a.poly) * &reflect(&b.poly));
    let over_x = q.coeffs().get(1..).unwrap_or(&[]);
    let coeffs = over_x.iter().step_by(2).map(|c| c / &pre).collect();
    Ok(QFamily { family, t, m, coeffs })
}

/// Checks the q-coefficient representation of `Re H` against the node weights.
pub fn representation_check(family: Family, t: u64, m: u64) -> Result<bool, CombError> {
    let q = qcoeffs(family, t, m)?;
    let beta = node_weights(&family.quad(t as u32, m as u32), &mut NumberTables::new());
    Ok(split_complex(&beta).0 == q.representation())
}

/// `Re H(π) = Σ_k β_k (-1)^k` for any quadruple.
pub fn reh_pi_quad(q: &IndexQuad) -> Rational {
    node_weights(q, &mut NumberTables::new())
        .iter()
        .map(|(&k, b)| b * sign_pow(k))
        .sum()
}

pub fn reh_pi(s: &crate::ddo::Stencil) -> Rational {
    reh_pi_quad(&s.quad())
}

/// Family and `m` of each alternating-sum item.
pub fn item_family(item: u32) -> Result<(Family, u64), CombError> {
    Ok(match item {
        1 => (Family::Sym, 2),
        2 => (Family::Sym, 3),
        3 => (Family::Check, 2),
        4 => (Family::Check, 3),
        5 => (Family::Hat, 2),
        6 => (Family::Hat, 3),
        7 => (Family::Tilde, 2),
        8 => (Family::Tilde, 3),
        _ => return Err(CombError::UnknownItem(item)),
    })
}

pub fn item_quad(item: u32, t: u32) -> Result<IndexQuad, CombError> {
    let (f, m) = item_family(item)?;
    Ok(f.quad(t, m as u32))
}

fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Closed forms of `Re H(π)` for the eight item families.
pub fn reh_pi_closed(item: u32, t: u64) -> Result<Rational, CombError> {
    let t = t as i64;
    let b = |n: i64, k: i64| binom(n as u64, k);
    Ok(match item {
        1 => -ratio(4 * (2 * t + 3), (t + 1) * (t + 1) * (t + 2)) / b(2 * t + 4, t + 2),
        2 => {
            let s = int(2) + ratio(3, t + 1) + ratio(1, t + 2) + ratio(1, t + 3);
            -ratio(8, t + 1) * s / b(2 * t + 6, t + 3)
        }
        3 => -ratio(4 * (2 * t + 5), (t + 1) * (t + 2) * (t + 3)) / b(2 * t + 5, t + 2),
        4 | 6 => {
            let num = int(4) * int(2 * t + 5) * int(t + 5) * int(2 * t + 7);
            let den = int(t + 1) * int(t + 2) * int(t + 3) * int(t + 4);
            -(num / den) / b(2 * t + 7, t + 3)
        }
        5 => {
            let num = int(4) * int(2 * t + 5) * int(t * t + 6 * t + 7);
            let den = int(t + 1) * int(t + 1) * int(t + 2) * int(t + 3);
            -(num / den) / b(2 * t + 5, t + 2)
        }
        7 => -ratio(4 * (2 * t + 5) * (t + 5), (t + 1) * (t + 2) * (t + 4)) / b(2 * t + 6, t + 2),
        8 => {
            let num = int(8) * int(2 * t + 7) * int(t * t + 8 * t + 13);
            let den = int(t + 1) * int(t + 2) * int(t + 3) * int(t + 5);
            -(num / den) / b(2 * t + 8, t + 3)
        }
        _ => return Err(CombError::UnknownItem(item)),
    })
}

/// `Z_{p,q}(n) = Σ_{0 <= d_1 <= ... <= d_q <= p} Π (n - d_i)^2`, by enumeration.
pub fn zfun(p: i64, q: i64, n: i64) -> Rational {
    fn walk(lo: i64, p: i64, left: i64, n: i64, acc: &BigInt) -> BigInt {
        if left == 0 {
            return acc.clone();
        }
        (lo..=p)
            .map(|d| {
                let f = BigInt::from((n - d) * (n - d));
                walk(d, p, left - 1, n, &(acc * f))
            })
            .sum()
    }
    if p < 0 || q < 0 {
        return Rational::zero();
    }
    big(walk(0, p, q, n, &BigInt::one()))
}

/// Checks `Z_{j+1-k,k} = Z_{j-k,k} + (n-j-1+k)^2 Z_{j+1-k,k-1}`.
pub fn zrec_check(j: i64, k: i64, n: i64) -> bool {
    let s = n - j - 1 + k;
    zfun(j + 1 - k, k, n) == zfun(j - k, k, n) + int(s * s) * zfun(j + 1 - k, k - 1, n)
}

/// Checks the expansion of the `2j`-th derivative of `C_{2n,n}`.
pub fn cder_expansion_check(n: u64, j: u64) -> bool {
    let lhs = cfun(2 * n, n as i64).derivative(2 * j as u32);
    let top = big(factorial(2 * n));
    let mut rhs = TrigPoly::zero();
    for k in 0..=j {
        let f = &top / big(factorial(2 * n - j + k));
        let w = sign_pow(k as i64) * &f * &f * zfun((j - k) as i64, k as i64, n as i64);
        rhs = &rhs + &cfun(2 * n - j + k, (n - j + k) as i64).scale(&w);
    }
    lhs == rhs
}

/// `Re H(π)` of `(t+m, t, t+m, t)` over `binom(2t+2m, t+m)^{-1} 2^{m+1} sin(mπ/2) / t`.
pub fn asymptotic_ratio(m: u64, t: u64) -> Result<Rational, CombError> {
    if m % 2 == 0 {
        return Err(CombError::EvenM(m));
    }
    let value = reh_pi_quad(&Family::Sym.quad(t as u32, m as u32));
    let sign = if m % 4 == 1 { int(1) } else { int(-1) };
    let scale =
        sign * big(BigInt::from(2u32).pow((m + 1) as u32)) / (int(t as i64) * binom(2 * t + 2 * m, (t + m) as i64));
    Ok(value / scale)
}

/// `t^{2j+1} q_{t,m;j} / (2 binom(2m, 2j+1))`, which tends to 1.
pub fn q_leading_ratio(m: u64, j: u64, t: u64) -> Result<f64, CombError> {
    let q = qcoeffs(Family::Sym, t, m)?;
    let tt = int(t as i64);
    let pw = (0..2 * j + 1).fold(Rational::one(), |acc, _| acc * &tt);
    let c = q.coeffs.get(j as usize).cloned().unwrap_or_else(Rational::zero);
    Ok(to_f64(&(pw * c / (int(2) * binom(2 * m, (2 * j + 1) as i64)))))
}

/// `S_n = Σ_{k=0}^{2n+1} (-1)^k H_k binom(2n+1, k)^2`.
pub fn harmonic_alternating_sum(n: u64) -> Rational {
    let mut t = NumberTables::new();
    (0..=2 * n + 1)
        .map(|k| {
            let b = t.binom(2 * n + 1, k as i64);
            sign_pow(k as i64) * t.harmonic(k) * &b * &b
        })
        .sum()
}

/// `(-1)^{n+1} 2^{4n} (n!)^2 / (2n+1)!`.
pub fn harmonic_identity_rhs(n: u64) -> Rational {
    let f = big(factorial(n));
    sign_pow(n as i64 + 1) * big(BigInt::from(2u32).pow(4 * n as u32)) * &f * &f / big(factorial(2 * n + 1))
}

pub fn identity_check(n: u64) -> bool {
    harmonic_alternating_sum(n) == harmonic_identity_rhs(n)
}

pub fn recurrence_check(n: u64) -> bool {
    let s0 = harmonic_alternating_sum(n);
    let s1 = harmonic_alternating_sum(n + 1);
    let s2 = harmonic_alternating_sum(n + 2);
    let n = n as i64;
    let a = int(64 * (n + 1) * (n + 1) * (8 * n + 17));
    let b = int(8 * (32 * n * n * n + 164 * n * n + 270 * n + 141));
    let c = int((8 * n + 9) * (2 * n + 5) * (2 * n + 5));
    (a * s0 + b * s1 + c * s2).is_zero()
}
