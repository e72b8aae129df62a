//! Two-moment Hermite schemes evolving cell averages and derivative averages.
//!
//! Unit spacing throughout. The semi-discrete system in Fourier space reads
//! `y' = -(1/h) M(θ) y` with `y = (û, h v̂ / (iθ))`.

use core::cmp::Ordering;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::exactnum::{int, sign_pow, to_f64, NumberTables, Rational};
use crate::trigpoly::{find_violation, split_complex, to_cos_poly, Laurent, TrigPoly};

/// Second derivatives at 0 of the Hermite fundamental polynomials on nodes `-l..=r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteFundamentals {
    pub l: u32,
    pub r: u32,
    /// `h_k''(0)` for the first kind `h_k = (1 - 2 l_k'(k)(x - k)) l_k^2`.
    pub h2pp: Laurent,
    /// `g_k''(0)` for the second kind `g_k = (x - k) l_k^2`.
    pub g2pp: Laurent,
    /// `l_k'(k)`.
    pub lprime: Laurent,
}

/// Power series truncated after `x^2`.
type Jet = [Rational; 3];

fn jet_mul(a: &Jet, b: &Jet) -> Jet {
    [
        &a[0] * &b[0],
        &a[0] * &b[1] + &a[1] * &b[0],
        &a[0] * &b[2] + &a[1] * &b[1] + &a[2] * &b[0],
    ]
}

fn linear(c0: Rational, c1: Rational) -> Jet {
    [c0, c1, Rational::zero()]
}

pub fn hermite_fundamentals(l: u32, r: u32) -> HermiteFundamentals {
    assert!(l + r >= 1, "empty stencil");
    let nodes: alloc::vec::Vec<i64> = (-(l as i64)..=r as i64).collect();
    let mut out = HermiteFundamentals {
        l,
        r,
        h2pp: Laurent::new(),
        g2pp: Laurent::new(),
        lprime: Laurent::new(),
    };
    for &k in &nodes {
        let mut lk: Jet = [Rational::one(), Rational::zero(), Rational::zero()];
        let mut lp = Rational::zero();
        for &n in nodes.iter().filter(|&&n| n != k) {
            let d = int(k - n).recip();
            lk = jet_mul(&lk, &linear(-int(n) * &d, d.clone()));
            lp += d;
        }
        let sq = jet_mul(&lk, &lk);
        let first = linear(Rational::one() + int(2 * k) * &lp, -int(2) * &lp);
        let second = linear(-int(k), Rational::one());
        out.h2pp.insert(k, int(2) * &jet_mul(&first, &sq)[2]);
        out.g2pp.insert(k, int(2) * &jet_mul(&second, &sq)[2]);
        out.lprime.insert(k, lp);
    }
    out
}

/// Optimal flux weights `c_k = binom(l+r, l+k)^2 / binom(2l+2r, l+r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FluxCoefficients {
    pub l: u32,
    pub r: u32,
    pub c: Laurent,
}

pub fn flux_coeffs(l: u32, r: u32) -> FluxCoefficients {
    assert!(l + r >= 1, "empty stencil");
    let mut t = NumberTables::new();
    let n = (l + r) as u64;
    let total = t.binom(2 * n, n as i64);
    let c = (-(l as i64)..=r as i64)
        .map(|k| {
            let b = t.binom(n, l as i64 + k);
            (k, &b * &b / &total)
        })
        .collect();
    FluxCoefficients { l, r, c }
}

struct Parts {
    fund: HermiteFundamentals,
    flux: FluxCoefficients,
    b0: Rational,
}

fn parts(l: u32, r: u32) -> Parts {
    let fund = hermite_fundamentals(l, r);
    let flux = flux_coeffs(l, r);
    let b0 = fund.g2pp.values().sum();
    Parts { fund, flux, b0 }
}

/// Laurent coefficients `2 c_k ζ_k + β_k - c_k b_0` of `H̃`.
pub fn hweno_symbol(l: u32, r: u32) -> Laurent {
    let p = parts(l, r);
    p.flux
        .c
        .iter()
        .map(|(k, c)| {
            let v = int(2) * c * &p.fund.lprime[k] + &p.fund.g2pp[k] - c * &p.b0;
            (*k, v)
        })
        .collect()
}

/// `Re H̃(θ)` as an exact cosine polynomial.
pub fn hweno_trace(l: u32, r: u32) -> TrigPoly {
    split_complex(&hweno_symbol(l, r)).0
}

/// `Σ_k c_k ζ_k (-1)^k`.
pub fn hweno_first_term_at_pi(l: u32, r: u32) -> Rational {
    let p = parts(l, r);
    p.flux.c.iter().map(|(k, c)| c * &p.fund.lprime[k] * sign_pow(*k)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HwenoVerdict {
    NecessaryConditionHolds,
    Unstable,
}

impl HwenoVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            HwenoVerdict::NecessaryConditionHolds => "NecessaryConditionHolds",
            HwenoVerdict::Unstable => "Unstable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HwenoReport {
    pub verdict: HwenoVerdict,
    pub trace: TrigPoly,
    pub at_pi: Rational,
    /// A `cos θ` value where the trace is negative.
    pub witness: Option<Rational>,
}

/// `Unstable` iff `Re H̃` takes a negative value somewhere.
pub fn hweno_classify(l: u32, r: u32) -> HwenoReport {
    let trace = hweno_trace(l, r);
    let p = to_cos_poly(&trace).expect("trace is a cosine polynomial");
    let witness = match find_violation(&p, &int(-1), &int(1), false, Ordering::Greater) {
        Some((w, false)) => Some(w),
        _ => None,
    };
    let verdict = if witness.is_some() {
        HwenoVerdict::Unstable
    } else {
        HwenoVerdict::NecessaryConditionHolds
    };
    let at_pi = trace.eval_at_pi();
    HwenoReport {
        verdict,
        trace,
        at_pi,
        witness,
    }
}

pub type Matrix2 = [[Complex64; 2]; 2];

/// The Fourier symbol `M(θ)`.
pub fn hweno_semidiscrete_matrix(l: u32, r: u32, theta: f64) -> Matrix2 {
    let p = parts(l, r);
    let i = Complex64::new(0.0, 1.0);
    let mut m = [[Complex64::zero(); 2]; 2];
    for (&k, c) in &p.flux.c {
        let kf = k as f64;
        let e = Complex64::new(libm::cos(kf * theta), libm::sin(kf * theta)) - 1.0;
        let e_over = if theta == 0.0 {
            Complex64::new(kf, 0.0)
        } else {
            e / (i * theta)
        };
        let cz = to_f64(&(int(2) * c * &p.fund.lprime[&k]));
        let cf = to_f64(c);
        let a21 = to_f64(&(&p.fund.h2pp[&k] + int(2) * c * &p.fund.lprime[&k] * &p.b0));
        let a22 = to_f64(&(&p.fund.g2pp[&k] - c * &p.b0));
        m[0][0] += e * cz;
        m[0][1] += -i * theta * e * cf;
        m[1][0] += e_over * a21;
        m[1][1] += e * a22;
    }
    m
}

pub fn eigenvalues2(m: &Matrix2) -> (Complex64, Complex64) {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let d = (tr * tr - det * 4.0).sqrt();
    ((tr + d) * 0.5, (tr - d) * 0.5)
}
