//! Trigonometric polynomials with rational coefficients, ordinary polynomials in
//! `x = cos θ`, and exact sign determination on intervals.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::exactnum::{frac, int, to_f64, Rational};

/// Laurent coefficients `k -> c_k` of `Σ c_k e^{ikθ}`.
pub type Laurent = BTreeMap<i64, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TrigError {
    #[error("trigonometric polynomial has a nonzero sine part")]
    NonzeroSinPart,
}

/// `Σ a_k cos kθ + Σ b_k sin kθ` with no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TrigPoly {
    cos: BTreeMap<u32, Rational>,
    sin: BTreeMap<u32, Rational>,
}

fn accumulate(map: &mut BTreeMap<u32, Rational>, k: u32, c: Rational) {
    if c.is_zero() {
        return;
    }
    let slot = map.entry(k).or_insert_with(Rational::zero);
    *slot += c;
    if slot.is_zero() {
        map.remove(&k);
    }
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::cos_term(0, c)
    }

    pub fn cos_term(k: u32, c: Rational) -> Self {
        let mut t = Self::zero();
        t.add_cos(k, c);
        t
    }

    pub fn sin_term(k: u32, c: Rational) -> Self {
        let mut t = Self::zero();
        t.add_sin(k, c);
        t
    }

    pub fn from_parts<C, S>(cos: C, sin: S) -> Self
    where
        C: IntoIterator<Item = (u32, Rational)>,
        S: IntoIterator<Item = (u32, Rational)>,
    {
        let mut t = Self::zero();
        for (k, c) in cos {
            t.add_cos(k, c);
        }
        for (k, c) in sin {
            t.add_sin(k, c);
        }
        t
    }

    pub fn add_cos(&mut self, k: u32, c: Rational) {
        accumulate(&mut self.cos, k, c);
    }

    /// Adds `c sin kθ`; the `k = 0` term vanishes identically and is dropped.
    pub fn add_sin(&mut self, k: u32, c: Rational) {
        if k > 0 {
            accumulate(&mut self.sin, k, c);
        }
    }

    pub fn cos_coeffs(&self) -> &BTreeMap<u32, Rational> {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &BTreeMap<u32, Rational> {
        &self.sin
    }

    pub fn cos_coeff(&self, k: u32) -> Rational {
        self.cos.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn sin_coeff(&self, k: u32) -> Rational {
        self.sin.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.cos.is_empty() && self.sin.is_empty()
    }

    pub fn is_cosine_only(&self) -> bool {
        self.sin.is_empty()
    }

    pub fn degree(&self) -> u32 {
        let c = self.cos.keys().next_back().copied().unwrap_or(0);
        let s = self.sin.keys().next_back().copied().unwrap_or(0);
        c.max(s)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_parts(
            self.cos.iter().map(|(&k, v)| (k, v * c)),
            self.sin.iter().map(|(&k, v)| (k, v * c)),
        )
    }

    /// The `order`-th derivative with respect to θ.
    pub fn derivative(&self, order: u32) -> Self {
        let mut out = self.clone();
        for _ in 0..order {
            let mut next = Self::zero();
            for (&k, c) in &out.cos {
                next.add_sin(k, -(c * int(k as i64)));
            }
            for (&k, c) in &out.sin {
                next.add_cos(k, c * int(k as i64));
            }
            out = next;
        }
        out
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let c: f64 = self
            .cos
            .iter()
            .map(|(&k, v)| to_f64(v) * libm::cos(k as f64 * theta))
            .sum();
        let s: f64 = self
            .sin
            .iter()
            .map(|(&k, v)| to_f64(v) * libm::sin(k as f64 * theta))
            .sum();
        c + s
    }

    pub fn eval_at_zero(&self) -> Rational {
        self.cos.values().cloned().sum()
    }

    pub fn eval_at_pi(&self) -> Rational {
        self.cos
            .iter()
            .map(|(&k, v)| if k % 2 == 0 { v.clone() } else { -v.clone() })
            .sum()
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (&k, c) in &rhs.cos {
            out.add_cos(k, c.clone());
        }
        for (&k, c) in &rhs.sin {
            out.add_sin(k, c.clone());
        }
        out
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(&-Rational::one())
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        self + &(-rhs)
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        trig_mul(self, rhs)
    }
}

/// Exact product via the product-to-sum rules.
pub fn trig_mul(a: &TrigPoly, b: &TrigPoly) -> TrigPoly {
    let half = frac(1, 2);
    let mut out = TrigPoly::zero();
    let diff = |p: u32, q: u32| (p as i64 - q as i64).unsigned_abs() as u32;
    for (&p, x) in &a.cos {
        for (&q, y) in &b.cos {
            let c = x * y * &half;
            out.add_cos(p + q, c.clone());
            out.add_cos(diff(p, q), c);
        }
        for (&q, y) in &b.sin {
            // cos p sin q = (sin(p+q) - sin(p-q)) / 2
            let c = x * y * &half;
            out.add_sin(p + q, c.clone());
            add_signed_sin(&mut out, p as i64 - q as i64, -c);
        }
    }
    for (&p, x) in &a.sin {
        for (&q, y) in &b.cos {
            let c = x * y * &half;
            out.add_sin(p + q, c.clone());
            add_signed_sin(&mut out, p as i64 - q as i64, c);
        }
        for (&q, y) in &b.sin {
            let c = x * y * &half;
            out.add_cos(diff(p, q), c.clone());
            out.add_cos(p + q, -c);
        }
    }
    out
}

fn add_signed_sin(t: &mut TrigPoly, k: i64, c: Rational) {
    if k >= 0 {
        t.add_sin(k as u32, c);
    } else {
        t.add_sin((-k) as u32, -c);
    }
}

/// Splits `Σ c_k e^{ikθ}` into its real and imaginary trigonometric parts.
pub fn split_complex(coeffs: &Laurent) -> (TrigPoly, TrigPoly) {
    let mut re = TrigPoly::zero();
    let mut im = TrigPoly::zero();
    for (&k, c) in coeffs {
        re.add_cos(k.unsigned_abs() as u32, c.clone());
        add_signed_sin(&mut im, k, c.clone());
    }
    (re, im)
}

/// Rewrites a cosine polynomial in `x = cos θ` through `cos kθ = T_k(x)`.
pub fn to_cos_poly(t: &TrigPoly) -> Result<Poly, TrigError> {
    if !t.is_cosine_only() {
        return Err(TrigError::NonzeroSinPart);
    }
    let degree = t.degree() as usize;
    let mut cheb = vec![Poly::one(), Poly::x()];
    while cheb.len() <= degree {
        let n = cheb.len();
        let next = &(&Poly::x().scale(&int(2)) * &cheb[n - 1]) - &cheb[n - 2];
        cheb.push(next);
    }
    let mut out = Poly::zero();
    for (&k, c) in t.cos_coeffs() {
        out = &out + &cheb[k as usize].scale(c);
    }
    Ok(out)
}

/// Dense univariate polynomial, lowest degree first, with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|v| v * c).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn sign_at(&self, x: &Rational) -> Ordering {
        self.eval(x).cmp(&Rational::zero())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let Some(n) = self.degree().filter(|&n| n >= dd) else {
            return (Poly::zero(), self.clone());
        };
        let mut quot = vec![Rational::zero(); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let c = &rem[i + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &c * dc;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Poly::zero(),
        }
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// The squarefree part `p / gcd(p, p')`, normalized to be monic.
    pub fn squarefree(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Divides out every factor `(x - a)` and returns the quotient with the multiplicity removed.
    pub fn deflate_at(&self, a: &Rational) -> (Poly, usize) {
        let root = Poly::new(vec![-a.clone(), Rational::one()]);
        let mut p = self.clone();
        let mut mult = 0;
        while !p.is_zero() && p.eval(a).is_zero() {
            p = p.div_rem(&root).0;
            mult += 1;
        }
        (p, mult)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Rational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// Sign classes reported by [`sign_on_interval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    StrictlyPositive,
    StrictlyNegative,
    Mixed,
    IdenticallyZero,
}

/// Outcome of a sign query. `witness` is present exactly when the sign is `Mixed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignReport {
    pub sign: Sign,
    pub witness: Option<Rational>,
    /// The polynomial vanishes somewhere in the interval without changing sign there.
    pub touches_zero: bool,
}

struct SturmChain(Vec<Poly>);

impl SturmChain {
    fn new(q: &Poly) -> Self {
        let mut chain = vec![q.clone(), q.derivative()];
        while let [.., prev, last] = chain.as_slice() {
            if last.is_zero() {
                break;
            }
            let (_, r) = prev.div_rem(last);
            chain.push(-&r);
        }
        chain.pop();
        SturmChain(chain)
    }

    fn variations(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for p in &self.0 {
            let s = p.sign_at(x);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of distinct roots in `(a, b]`.
    fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

#[derive(Debug, Clone)]
enum RootItem {
    Exact(Rational),
    Bracket(Rational, Rational),
}

impl RootItem {
    fn bounds(&self) -> (Rational, Rational) {
        match self {
            RootItem::Exact(r) => (r.clone(), r.clone()),
            RootItem::Bracket(a, b) => (a.clone(), b.clone()),
        }
    }

    fn location(&self) -> Rational {
        let (a, b) = self.bounds();
        (a + b) / int(2)
    }
}

fn isolate(q: &Poly, chain: &SturmChain, a: Rational, b: Rational, width: &Rational, out: &mut Vec<RootItem>) {
    let n = chain.count(&a, &b);
    if n == 0 {
        return;
    }
    if n == 1 && &(&b - &a) < width {
        if q.eval(&b).is_zero() {
            out.push(RootItem::Exact(b));
        } else {
            out.push(RootItem::Bracket(a, b));
        }
        return;
    }
    let mid = (&a + &b) / int(2);
    isolate(q, chain, a, mid.clone(), width, out);
    isolate(q, chain, mid, b, width, out);
}

/// Roots and constant-sign sample points of a polynomial on an interval.
struct SignScan {
    roots: Vec<RootItem>,
    samples: Vec<(Rational, Rational, Ordering)>,
}

impl SignScan {
    /// `samples` holds `(point, gap length, sign of p)` for every root-free gap.
    fn new(p: &Poly, lo: &Rational, hi: &Rational, open_at_hi: bool) -> Self {
        let q = p.squarefree();
        let chain = SturmChain::new(&q);
        let width = frac(1, 1024);
        let mut roots = Vec::new();
        if q.eval(lo).is_zero() {
            roots.push(RootItem::Exact(lo.clone()));
        }
        isolate(&q, &chain, lo.clone(), hi.clone(), &width, &mut roots);
        if open_at_hi {
            roots.retain(|r| !matches!(r, RootItem::Exact(x) if x == hi));
        }

        let mut samples = Vec::new();
        let mut left = lo.clone();
        let mut left_is_root = false;
        let ends = roots
            .iter()
            .map(|r| (r.bounds(), matches!(r, RootItem::Exact(_))))
            .chain(core::iter::once(((hi.clone(), hi.clone()), false)));
        for ((a, b), exact) in ends {
            let gap = &a - &left;
            if gap.is_positive() {
                let mid = (&a + &left) / int(2);
                let s = p.sign_at(&mid);
                samples.push((mid, gap, s));
            } else if !left_is_root && !exact && a == left {
                let s = p.sign_at(&a);
                samples.push((a.clone(), Rational::zero(), s));
            }
            left = b;
            left_is_root = exact;
        }
        SignScan { roots, samples }
    }

    fn report(&self) -> SignReport {
        let pos: Rational = self.measure(Ordering::Greater);
        let neg: Rational = self.measure(Ordering::Less);
        let has_pos = self.samples.iter().any(|s| s.2 == Ordering::Greater);
        let has_neg = self.samples.iter().any(|s| s.2 == Ordering::Less);
        match (has_pos, has_neg) {
            (true, true) => {
                let minority = if pos >= neg { Ordering::Less } else { Ordering::Greater };
                let witness = self.samples.iter().find(|s| s.2 == minority).map(|s| s.0.clone());
                SignReport {
                    sign: Sign::Mixed,
                    witness,
                    touches_zero: false,
                }
            }
            (true, false) | (false, true) if !self.roots.is_empty() => SignReport {
                sign: Sign::Mixed,
                witness: Some(self.roots[0].location()),
                touches_zero: true,
            },
            (true, false) => SignReport {
                sign: Sign::StrictlyPositive,
                witness: None,
                touches_zero: false,
            },
            (false, true) => SignReport {
                sign: Sign::StrictlyNegative,
                witness: None,
                touches_zero: false,
            },
            (false, false) => SignReport {
                sign: Sign::IdenticallyZero,
                witness: None,
                touches_zero: false,
            },
        }
    }

    fn measure(&self, s: Ordering) -> Rational {
        self.samples.iter().filter(|x| x.2 == s).map(|x| x.1.clone()).sum()
    }

    /// A point where `p` fails to have the sign `want`, preferring points of the opposite sign.
    fn violation(&self, want: Ordering) -> Option<(Rational, bool)> {
        if let Some(s) = self.samples.iter().find(|s| s.2 != want) {
            return Some((s.0.clone(), s.2 == Ordering::Equal));
        }
        self.roots.first().map(|r| (r.location(), true))
    }
}

/// Decides the sign of `p` on `[lo, hi]`, or on `[lo, hi)` when `open_at_hi` is set.
pub fn sign_on_interval(p: &Poly, lo: &Rational, hi: &Rational, open_at_hi: bool) -> SignReport {
    assert!(lo < hi, "empty interval");
    if p.is_zero() {
        return SignReport {
            sign: Sign::IdenticallyZero,
            witness: None,
            touches_zero: false,
        };
    }
    SignScan::new(p, lo, hi, open_at_hi).report()
}

/// Looks for a point of the interval where `p` is not strictly of sign `want`.
///
/// Returns the point and whether `p` merely vanishes there (a tangential zero)
/// rather than taking the opposite sign.
pub fn find_violation(
    p: &Poly,
    lo: &Rational,
    hi: &Rational,
    open_at_hi: bool,
    want: Ordering,
) -> Option<(Rational, bool)> {
    assert!(lo < hi, "empty interval");
    if p.is_zero() {
        return Some((lo.clone(), true));
    }
    let opposite = want.reverse();
    let probes = 16i64;
    let mut order: Vec<i64> = (1..probes).collect();
    order.sort_by_key(|i| (2 * i - probes).abs());
    order.push(0);
    if !open_at_hi {
        order.push(probes);
    }
    for i in order {
        let x = lo + (hi - lo) * frac(i, probes);
        if p.sign_at(&x) == opposite {
            return Some((x, false));
        }
    }
    SignScan::new(p, lo, hi, open_at_hi).violation(want)
}

/// Number of distinct real roots of `p` in `(a, b]`.
pub fn count_roots(p: &Poly, a: &Rational, b: &Rational) -> usize {
    if p.is_zero() {
        return usize::MAX;
    }
    SturmChain::new(&p.squarefree()).count(a, b)
}
