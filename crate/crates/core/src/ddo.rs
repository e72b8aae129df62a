//! Stencils and the optimally accurate hybrid-variable first-derivative operator
//!
//! `[D u]_j = Σ_k α_k ū_{j+k+1/2} + Σ_k β_k u_{j+k}` (unit spacing).

use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::exactnum::{big, factorial, int, solve_linear, ExactError, NumberTables, Rational};
use crate::trigpoly::{split_complex, Laurent, TrigPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DdoError {
    #[error("stencil must use at least one cell or node (L + R >= 1)")]
    Empty,
    #[error("index quadruple ({l},{r},{lp},{rp}) is not a contiguous stencil")]
    NotContiguous { l: u32, r: u32, lp: u32, rp: u32 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// General index quadruple: cells `-l..r-1` and nodes `-lp..=rp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexQuad {
    pub l: u32,
    pub r: u32,
    pub lp: u32,
    pub rp: u32,
}

impl IndexQuad {
    pub fn new(l: u32, r: u32, lp: u32, rp: u32) -> Self {
        IndexQuad { l, r, lp, rp }
    }

    pub fn is_contiguous(&self) -> bool {
        (self.l == self.lp || self.l == self.lp + 1) && (self.r == self.rp || self.r == self.rp + 1)
    }
}

impl fmt::Display for IndexQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.l, self.r, self.lp, self.rp)
    }
}

/// A contiguous stencil determined by its left and right widths `(L, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Stencil {
    quad: IndexQuad,
}

impl Stencil {
    pub fn from_lr(left: u32, right: u32) -> Result<Self, DdoError> {
        if left + right == 0 {
            return Err(DdoError::Empty);
        }
        let lp = left / 2;
        let rp = right / 2;
        Ok(Stencil {
            quad: IndexQuad::new(left - lp, right - rp, lp, rp),
        })
    }

    pub fn from_quad(q: IndexQuad) -> Result<Self, DdoError> {
        if !q.is_contiguous() {
            return Err(DdoError::NotContiguous {
                l: q.l,
                r: q.r,
                lp: q.lp,
                rp: q.rp,
            });
        }
        Self::from_lr(q.l + q.lp, q.r + q.rp)
    }

    pub fn quad(&self) -> IndexQuad {
        self.quad
    }

    pub fn l(&self) -> u32 {
        self.quad.l
    }

    pub fn r(&self) -> u32 {
        self.quad.r
    }

    pub fn lp(&self) -> u32 {
        self.quad.lp
    }

    pub fn rp(&self) -> u32 {
        self.quad.rp
    }

    /// `L = l + l'`.
    pub fn left(&self) -> u32 {
        self.quad.l + self.quad.lp
    }

    /// `R = r + r'`.
    pub fn right(&self) -> u32 {
        self.quad.r + self.quad.rp
    }
}

impl fmt::Display for Stencil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.left(), self.right())
    }
}

pub fn stencil_from_lr(left: u32, right: u32) -> Result<Stencil, DdoError> {
    Stencil::from_lr(left, right)
}

/// Cell weights `alpha` on `[-l, r-1]` and node weights `beta` on `[-l', r']`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdoCoefficients {
    pub stencil: Stencil,
    pub alpha: Laurent,
    pub beta: Laurent,
    pub order: u32,
}

fn mul3(a: Rational, b: &Rational, c: &Rational) -> Rational {
    a * b * c
}

/// Node weights from the closed form; valid for any quadruple, contiguous or not.
pub fn node_weights(q: &IndexQuad, t: &mut NumberTables) -> Laurent {
    let (l, r, lp, rp) = (q.l as u64, q.r as u64, q.lp as u64, q.rp as u64);
    let mut beta = Laurent::new();
    let z0 = t.zeta(l, r, 0).expect("k = 0 in range") + t.zeta(lp, rp, 0).expect("k = 0 in range");
    beta.insert(0, z0 * int(2));
    for k in -(q.lp as i64)..=(q.rp as i64) {
        if k == 0 {
            continue;
        }
        let c1 = t.cmn(l, r, k).expect("node index inside cell range");
        let c2 = t.cmn(lp, rp, k).expect("node index inside node range");
        beta.insert(k, mul3(Rational::new((-2).into(), k.into()), &c1, &c2));
    }
    beta
}

fn cell_term(q: &IndexQuad, k: i64, t: &mut NumberTables) -> Rational {
    let (l, r, lp, rp) = (q.l as u64, q.r as u64, q.lp as u64, q.rp as u64);
    let z = t.zeta(l, r, k).unwrap() + t.zeta(lp, rp, k).unwrap();
    let c = t.cmn(l, r, k).unwrap() * t.cmn(lp, rp, k).unwrap();
    (Rational::one() + int(k) * z) * int(2) / int(k * k) * c
}

fn cell_weights(q: &IndexQuad, t: &mut NumberTables) -> Laurent {
    let (l, r, lp, rp) = (q.l as i64, q.r as i64, q.lp as i64, q.rp as i64);
    let mut alpha = Laurent::new();
    let left_end = if q.l == q.lp {
        Rational::zero()
    } else {
        let c1 = t.cmn(q.l as u64, q.r as u64, -l).unwrap();
        let c2 = t.cmn(q.l as u64, q.rp as u64, -l).unwrap();
        Rational::new(2.into(), (l * l).into()) * c1 * c2
    };
    let right_end = if q.r == q.rp {
        Rational::zero()
    } else {
        let c1 = t.cmn(q.l as u64, q.r as u64, r).unwrap();
        let c2 = t.cmn(q.lp as u64, q.r as u64, r).unwrap();
        Rational::new(2.into(), (r * r).into()) * c1 * c2
    };
    for nu in -l..0 {
        let mut s = -left_end.clone();
        for k in -lp..=nu {
            s -= cell_term(q, k, t);
        }
        alpha.insert(nu, s);
    }
    for nu in 0..r {
        let mut s = right_end.clone();
        for k in (nu + 1)..=rp {
            s += cell_term(q, k, t);
        }
        alpha.insert(nu, s);
    }
    alpha
}

/// The unique operator of optimal order `L + R` on the stencil, from closed-form weights.
pub fn build_ddo(s: &Stencil) -> DdoCoefficients {
    let mut t = NumberTables::new();
    let q = s.quad();
    DdoCoefficients {
        stencil: *s,
        alpha: cell_weights(&q, &mut t),
        beta: node_weights(&q, &mut t),
        order: s.left() + s.right(),
    }
}

/// Image of the monomial `x^q` under the operator's cell-average and node samples.
fn cell_average_of_monomial(k: i64, q: u32) -> Rational {
    let hi = big(num_bigint::BigInt::from(k + 1).pow(q + 1));
    let lo = big(num_bigint::BigInt::from(k).pow(q + 1));
    (hi - lo) / int(q as i64 + 1)
}

fn node_value_of_monomial(k: i64, q: u32) -> Rational {
    big(num_bigint::BigInt::from(k).pow(q))
}

/// Solves the order conditions on the given cells and nodes directly.
pub fn oracle_weights(q: &IndexQuad) -> Result<(Laurent, Laurent), DdoError> {
    let cells: Vec<i64> = (-(q.l as i64)..q.r as i64).collect();
    let nodes: Vec<i64> = (-(q.lp as i64)..=q.rp as i64).collect();
    let n = cells.len() + nodes.len();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for p in 0..n as u32 {
        let row: Vec<Rational> = cells
            .iter()
            .map(|&k| cell_average_of_monomial(k, p))
            .chain(nodes.iter().map(|&k| node_value_of_monomial(k, p)))
            .collect();
        a.push(row);
        b.push(if p == 1 { Rational::one() } else { Rational::zero() });
    }
    let x = solve_linear(a, b)?;
    let alpha = cells.iter().copied().zip(x[..cells.len()].iter().cloned()).collect();
    let beta = nodes.iter().copied().zip(x[cells.len()..].iter().cloned()).collect();
    Ok((alpha, beta))
}

/// Independent construction from the exact linear system of order conditions.
pub fn build_ddo_oracle(s: &Stencil) -> Result<DdoCoefficients, DdoError> {
    let (alpha, beta) = oracle_weights(&s.quad())?;
    Ok(DdoCoefficients {
        stencil: *s,
        alpha,
        beta,
        order: s.left() + s.right(),
    })
}

/// Real and imaginary parts of `H`, `G` and `F = (e^{iθ} - 1) G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeSymbols {
    pub h_re: TrigPoly,
    pub h_im: TrigPoly,
    pub g_re: TrigPoly,
    pub g_im: TrigPoly,
    pub f_re: TrigPoly,
    pub f_im: TrigPoly,
}

/// Laurent coefficients of `(e^{iθ} - 1) Σ α_k e^{ikθ}`.
pub fn shift_difference(alpha: &Laurent) -> Laurent {
    let mut f = Laurent::new();
    for (&k, a) in alpha {
        *f.entry(k + 1).or_insert_with(Rational::zero) += a;
        *f.entry(k).or_insert_with(Rational::zero) -= a;
    }
    f.retain(|_, v| !v.is_zero());
    f
}

pub fn symbols(d: &DdoCoefficients) -> SchemeSymbols {
    let (h_re, h_im) = split_complex(&d.beta);
    let (g_re, g_im) = split_complex(&d.alpha);
    let (f_re, f_im) = split_complex(&shift_difference(&d.alpha));
    SchemeSymbols {
        h_re,
        h_im,
        g_re,
        g_im,
        f_re,
        f_im,
    }
}

/// Residual of the operator on `x^q` against the exact derivative at the origin.
pub fn monomial_residual(d: &DdoCoefficients, q: u32) -> Rational {
    let cells: Rational = d.alpha.iter().map(|(&k, a)| a * cell_average_of_monomial(k, q)).sum();
    let nodes: Rational = d.beta.iter().map(|(&k, b)| b * node_value_of_monomial(k, q)).sum();
    let exact = if q == 1 { Rational::one() } else { Rational::zero() };
    cells + nodes - exact
}

/// Largest `p` with exactness on all polynomials of degree `<= p`, and the error constant `c_p`.
pub fn truncation_order(d: &DdoCoefficients) -> (u32, Rational) {
    let cap = 2 * (d.alpha.len() + d.beta.len()) as u32 + 4;
    let mut q = 0;
    while q <= cap && monomial_residual(d, q).is_zero() {
        q += 1;
    }
    let p = q.saturating_sub(1);
    let c = monomial_residual(d, q) / big(factorial(q as u64));
    (p, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::frac;
    use crate::trigpoly::{to_cos_poly, Poly};
    use proptest::prelude::*;

    fn laurent(pairs: &[(i64, i64, i64)]) -> Laurent {
        pairs.iter().map(|&(k, n, d)| (k, frac(n, d))).collect()
    }

    #[test]
    fn stencil_examples() {
        let s = Stencil::from_lr(4, 3).unwrap();
        assert_eq!(s.quad(), IndexQuad::new(2, 2, 2, 1));
        assert_eq!(Stencil::from_lr(7, 0).unwrap().quad(), IndexQuad::new(4, 0, 3, 0));
        assert_eq!(Stencil::from_lr(1, 0).unwrap().quad(), IndexQuad::new(1, 0, 0, 0));
        assert_eq!(Stencil::from_lr(0, 0), Err(DdoError::Empty));
        assert!(Stencil::from_quad(IndexQuad::new(4, 1, 2, 0)).is_err());
        assert_eq!(
            Stencil::from_quad(IndexQuad::new(3, 1, 3, 0)).unwrap(),
            Stencil::from_lr(6, 1).unwrap()
        );
    }

    #[test]
    fn reference_coefficients() {
        let d = build_ddo(&Stencil::from_lr(4, 3).unwrap());
        assert_eq!(
            d.alpha,
            laurent(&[(-2, -53, 216), (-1, -725, 216), (0, 355, 216), (1, 1, 72)])
        );
        assert_eq!(d.beta, laurent(&[(-2, 1, 18), (-1, 4, 3), (0, 1, 1), (1, -4, 9)]));
        let d = build_ddo(&Stencil::from_lr(5, 2).unwrap());
        assert_eq!(
            d.alpha,
            laurent(&[(-3, -1, 72), (-2, -77, 72), (-1, -401, 72), (0, 59, 72)])
        );
        assert_eq!(d.beta, laurent(&[(-2, 1, 3), (-1, 3, 1), (0, 8, 3), (1, -1, 6)]));
        let d = build_ddo(&Stencil::from_lr(7, 0).unwrap());
        assert_eq!(
            d.alpha,
            laurent(&[(-4, -1, 8), (-3, -65, 8), (-2, -209, 8), (-1, -145, 8)])
        );
        assert_eq!(d.beta, laurent(&[(-3, 8, 3), (-2, 18, 1), (-1, 24, 1), (0, 47, 6)]));
    }

    #[test]
    fn oracle_small_and_large() {
        for (l, r) in [(4, 3), (1, 0), (8, 7), (7, 0), (0, 1), (2, 5)] {
            let s = Stencil::from_lr(l, r).unwrap();
            assert_eq!(build_ddo(&s), build_ddo_oracle(&s).unwrap(), "{s}");
        }
    }

    #[test]
    fn gapped_quadruples_share_node_weights_with_oracle() {
        for t in 0..3 {
            for q in [
                IndexQuad::new(t + 4, t + 1, t + 2, t),
                IndexQuad::new(t + 5, t + 1, t + 3, t),
            ] {
                let (_, beta) = oracle_weights(&q).unwrap();
                assert_eq!(node_weights(&q, &mut NumberTables::new()), beta, "{q}");
            }
        }
    }

    #[test]
    fn symbol_examples() {
        let d = build_ddo(&Stencil::from_lr(4, 3).unwrap());
        let sym = symbols(&d);
        assert_eq!(sym.h_re.eval_at_zero(), frac(35, 18));
        assert!(sym.f_re.eval_at_zero().is_zero());
        assert!(sym.f_im.eval(0.0).abs() < 1e-15);
        let expected =
            &(&Poly::from_ints(&[1, 1]) * &Poly::from_ints(&[7, 1])).scale(&frac(1, 9)) + &Poly::constant(frac(1, 6));
        assert_eq!(to_cos_poly(&sym.h_re).unwrap(), expected);
    }

    #[test]
    fn order_examples() {
        let (p, c) = truncation_order(&build_ddo(&Stencil::from_lr(4, 3).unwrap()));
        assert_eq!(p, 7);
        assert!(!c.is_zero());
        assert_eq!(truncation_order(&build_ddo(&Stencil::from_lr(1, 0).unwrap())).0, 1);
        let (p, c) = truncation_order(&build_ddo(&Stencil::from_lr(7, 0).unwrap()));
        assert_eq!(p, 7);
        assert!(!c.is_zero());
    }

    #[test]
    fn node_weight_sum_positive_iff_upwind() {
        for l in 0..=10 {
            for r in 0..=10 {
                let Ok(s) = Stencil::from_lr(l, r) else { continue };
                let b0: Rational = build_ddo(&s).beta.values().cloned().sum();
                assert_eq!(b0 > Rational::zero(), l > r, "{s}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn consistent_and_of_full_order(l in 0u32..9, r in 0u32..9) {
            prop_assume!(l + r >= 1);
            let d = build_ddo(&Stencil::from_lr(l, r).unwrap());
            let total: Rational = d.alpha.values().chain(d.beta.values()).cloned().sum();
            prop_assert!(total.is_zero());
            prop_assert_eq!(truncation_order(&d).0, l + r);
            let sym = symbols(&d);
            let f = shift_difference(&d.alpha);
            let fsum: Rational = f.values().cloned().sum();
            prop_assert!(fsum.is_zero());
            let theta = 0.7;
            let fe = sym.f_re.eval(theta);
            let direct = (libm::cos(theta) - 1.0) * sym.g_re.eval(theta) - libm::sin(theta) * sym.g_im.eval(theta);
            prop_assert!((fe - direct).abs() < 1e-9);
        }
    }
}
