//! Exact linear stability classification of hybrid-variable semi-discretizations.
//!
//! A scheme with symbols `H`, `F` is stable iff `Re H > 0` and
//! `Re H · Re(conj(H) F) + (Im F)^2 < 0` for all `θ ∈ (0, 2π)`. Both quantities
//! are even in θ, so they are tested as polynomials in `x = cos θ` on `[-1, 1)`.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Signed;

use crate::ddo::{build_ddo, symbols, SchemeSymbols, Stencil};
use crate::exactnum::{int, Rational};
use crate::trigpoly::{find_violation, to_cos_poly, trig_mul, Poly, TrigError, TrigPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Stable,
    UnstableTracePositive,
    UnstableTraceViolated,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Stable => "Stable",
            Status::UnstableTracePositive => "UnstableTracePositive",
            Status::UnstableTraceViolated => "UnstableTraceViolated",
        }
    }

    /// Compact table symbol.
    pub fn symbol(&self) -> &'static str {
        match self {
            Status::Stable => "S",
            Status::UnstableTracePositive => "hc",
            Status::UnstableTraceViolated => "x",
        }
    }

    pub fn is_stable(&self) -> bool {
        matches!(self, Status::Stable)
    }
}

/// A condition polynomial `(1 - x)^mult · residual` in `x = cos θ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factored {
    pub full: Poly,
    pub residual: Poly,
    pub mult: usize,
}

impl Factored {
    pub fn new(full: Poly) -> Self {
        let (rest, mult) = full.deflate_at(&int(1));
        let residual = if mult % 2 == 0 { rest } else { -&rest };
        Factored { full, residual, mult }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionPolys {
    /// `Re H` in `x`.
    pub trace: Factored,
    /// `Re H · Re(conj(H) F) + (Im F)^2` in `x`.
    pub second: Factored,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub stencil: Stencil,
    pub status: Status,
    /// A `cos θ` value in `[-1, 1)` where the failing condition is not strict.
    pub witness: Option<Rational>,
    /// The failing condition only touches zero at the witness without changing sign.
    pub touches_zero: bool,
    /// `L > R`; other stencils are classified but flagged.
    pub upwind: bool,
    pub conditions: ConditionPolys,
}

/// Condition polynomials with their `(1 - x)` factors split off.
pub fn condition_polys(sym: &SchemeSymbols) -> Result<ConditionPolys, TrigError> {
    let re_hbar_f = &trig_mul(&sym.h_re, &sym.f_re) + &trig_mul(&sym.h_im, &sym.f_im);
    let second = &trig_mul(&sym.h_re, &re_hbar_f) + &trig_mul(&sym.f_im, &sym.f_im);
    Ok(ConditionPolys {
        trace: Factored::new(to_cos_poly(&sym.h_re)?),
        second: Factored::new(to_cos_poly(&second)?),
    })
}

pub fn classify(s: &Stencil) -> StabilityVerdict {
    let sym = symbols(&build_ddo(s));
    let conditions = condition_polys(&sym).expect("condition polynomials are even in θ");
    let lo = int(-1);
    let hi = int(1);
    let trace_fail = find_violation(&conditions.trace.residual, &lo, &hi, true, Ordering::Greater);
    let (status, fail) = match trace_fail {
        Some(w) => (Status::UnstableTraceViolated, Some(w)),
        None => match find_violation(&conditions.second.residual, &lo, &hi, true, Ordering::Less) {
            Some(w) => (Status::UnstableTracePositive, Some(w)),
            None => (Status::Stable, None),
        },
    };
    let (witness, touches_zero) = match fail {
        Some((w, t)) => (Some(w), t),
        None => (None, false),
    };
    StabilityVerdict {
        stencil: *s,
        status,
        witness,
        touches_zero,
        upwind: s.left() > s.right(),
        conditions,
    }
}

/// Verdicts for all `0 <= R < L <= max_l`, ordered by `L` then `R`.
pub fn stability_table(max_l: u32) -> Vec<StabilityVerdict> {
    let mut out = Vec::new();
    for l in 1..=max_l {
        for r in 0..l {
            out.push(classify(&Stencil::from_lr(l, r).expect("L >= 1")));
        }
    }
    out
}

/// Necessary condition for nonnegativity of a cosine polynomial: `|c_k| < 2 c_0` for `k >= 1`.
pub fn coefficient_bound_check(c: &TrigPoly) -> Result<(bool, Option<u32>), TrigError> {
    if !c.is_cosine_only() {
        return Err(TrigError::NonzeroSinPart);
    }
    let bound = c.cos_coeff(0) * int(2);
    let failing = c
        .cos_coeffs()
        .iter()
        .filter(|(&k, _)| k >= 1)
        .find(|(_, v)| v.abs() >= bound)
        .map(|(&k, _)| k);
    Ok((failing.is_none(), failing))
}

/// Which branch of the barrier bound is smaller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Linear,
    SquareRoot,
}

/// The bound `L - R < min(2R + 7, 9 + sqrt(21R + 49))` for a fixed `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BarrierBound {
    pub right: u64,
    pub linear: u64,
    pub radicand: u64,
}

impl BarrierBound {
    /// Exact integer test of `gap < min(linear, 9 + sqrt(radicand))`.
    pub fn admits(&self, gap: i64) -> bool {
        let below_linear = gap < self.linear as i64;
        let d = gap - 9;
        let below_sqrt = d < 0 || (d as i128) * (d as i128) < self.radicand as i128;
        below_linear && below_sqrt
    }

    /// Largest admitted gap `L - R`.
    pub fn max_gap(&self) -> i64 {
        let mut g = self.linear as i64 - 1;
        while !self.admits(g) {
            g -= 1;
        }
        g
    }

    /// Linear branch is active when `2R + 7 <= 9 + sqrt(21R + 49)`, decided exactly.
    pub fn active_branch(&self) -> Branch {
        let lhs = self.linear as i64 - 9;
        if lhs <= 0 || (lhs as i128) * (lhs as i128) <= self.radicand as i128 {
            Branch::Linear
        } else {
            Branch::SquareRoot
        }
    }

    pub fn value_f64(&self) -> f64 {
        let s = 9.0 + libm::sqrt(self.radicand as f64);
        s.min(self.linear as f64)
    }
}

pub fn barrier_bound(right: u64) -> BarrierBound {
    BarrierBound {
        right,
        linear: 2 * right + 7,
        radicand: 21 * right + 49,
    }
}

fn symbol_laurent(t_re: &TrigPoly, t_im: &TrigPoly, theta: f64) -> Complex64 {
    Complex64::new(t_re.eval(theta), t_im.eval(theta))
}

/// Roots of `λ^2 - H λ - F = 0` at one angle.
pub fn symbol_roots(sym: &SchemeSymbols, theta: f64) -> (Complex64, Complex64) {
    let h = symbol_laurent(&sym.h_re, &sym.h_im, theta);
    let f = symbol_laurent(&sym.f_re, &sym.f_im, theta);
    let d = (h * h + f * 4.0).sqrt();
    ((h + d) * 0.5, (h - d) * 0.5)
}

/// Minimum real part of the two roots on `n_samples` interior angles of `(0, 2π)`.
pub fn eigen_sweep(sym: &SchemeSymbols, n_samples: usize) -> Vec<(f64, f64)> {
    (1..=n_samples)
        .map(|i| {
            let theta = 2.0 * PI * i as f64 / (n_samples + 1) as f64;
            let (a, b) = symbol_roots(sym, theta);
            (theta, a.re.min(b.re))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::frac;
    use crate::trigpoly::{sign_on_interval, Sign};

    fn pw(base: &Poly, e: usize) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| &acc * base)
    }

    fn st(l: u32, r: u32) -> Stencil {
        Stencil::from_lr(l, r).unwrap()
    }

    #[test]
    fn second_condition_closed_forms() {
        let one_minus_x = Poly::from_ints(&[1, -1]);
        let c = condition_polys(&symbols(&build_ddo(&st(4, 3)))).unwrap();
        let expected = (&pw(&one_minus_x, 5) * &Poly::from_ints(&[13, 1])).scale(&frac(-1, 1458));
        assert_eq!(c.second.full, expected);
        assert_eq!(c.second.mult, 5);
        assert_eq!(c.second.residual, Poly::from_ints(&[13, 1]).scale(&frac(-1, 1458)));
        let c = condition_polys(&symbols(&build_ddo(&st(5, 2)))).unwrap();
        let expected = (&pw(&one_minus_x, 5) * &Poly::from_ints(&[2, 5])).scale(&frac(1, 324));
        assert_eq!(c.second.full, expected);
    }

    #[test]
    fn seven_zero_trace_polynomial() {
        let c = condition_polys(&symbols(&build_ddo(&st(7, 0)))).unwrap();
        let expected = Poly::new(alloc::vec![frac(-61, 6), int(16), int(36), frac(32, 3)]);
        assert_eq!(c.trace.full, expected);
        assert_eq!(c.trace.mult, 0);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&st(4, 3)).status, Status::Stable);
        let v = classify(&st(5, 2));
        assert_eq!(v.status, Status::UnstableTracePositive);
        assert!(v.witness.clone().unwrap() > frac(-2, 5));
        let v = classify(&st(7, 0));
        assert_eq!(v.status, Status::UnstableTraceViolated);
        let w = v.witness.unwrap();
        assert!(v.conditions.trace.full.eval(&w).is_negative());
        assert!(w > int(-1) && w < int(1));
        assert!(v.conditions.trace.full.eval(&int(0)).is_negative());
    }

    #[test]
    fn small_table_is_stable() {
        let t = stability_table(3);
        assert_eq!(t.len(), 6);
        assert!(t.iter().all(|v| v.status == Status::Stable));
        assert_eq!(classify(&st(3, 0)).status, Status::Stable);
    }

    #[test]
    fn coefficient_bound_examples() {
        let p = TrigPoly::from_parts([(0, int(1)), (1, int(1))], []);
        assert_eq!(coefficient_bound_check(&p).unwrap(), (true, None));
        let p = TrigPoly::from_parts([(0, int(1)), (1, int(3))], []);
        assert_eq!(coefficient_bound_check(&p).unwrap(), (false, Some(1)));
        let h = symbols(&build_ddo(&st(12, 0))).h_re;
        assert!(!coefficient_bound_check(&h).unwrap().0);
    }

    #[test]
    fn barrier_examples() {
        let b = barrier_bound(0);
        assert_eq!(b.active_branch(), Branch::Linear);
        assert_eq!(b.max_gap(), 6);
        let b = barrier_bound(9);
        assert_eq!(b.active_branch(), Branch::SquareRoot);
        assert_eq!(b.max_gap(), 24);
        assert_eq!(barrier_bound(8).active_branch(), Branch::Linear);
        let b = barrier_bound(100);
        assert!(b.admits(54));
        assert!(b.admits(55));
        assert!(!b.admits(56));
    }

    #[test]
    fn eigen_sweep_examples() {
        let min = |l, r| {
            let sym = symbols(&build_ddo(&st(l, r)));
            eigen_sweep(&sym, 1000)
                .iter()
                .map(|p| p.1)
                .fold(f64::INFINITY, f64::min)
        };
        assert!(min(4, 3) >= -1e-9);
        assert!(min(5, 2) < -1e-6);
        let sym = symbols(&build_ddo(&st(4, 3)));
        let (a, b) = symbol_roots(&sym, 0.0);
        assert!(a.norm() < 1e-14 || b.norm() < 1e-14);
        assert!((a.re.max(b.re) - 35.0 / 18.0).abs() < 1e-12);
    }

    #[test]
    fn conditions_are_even() {
        for l in 0..=12 {
            for r in 0..=12 {
                if l + r == 0 {
                    continue;
                }
                assert!(condition_polys(&symbols(&build_ddo(&st(l, r)))).is_ok(), "({l},{r})");
            }
        }
    }

    #[test]
    fn verdicts_agree_with_eigen_sweep() {
        for l in 1..=10 {
            for r in 0..l {
                let v = classify(&st(l, r));
                let sym = symbols(&build_ddo(&st(l, r)));
                let min = eigen_sweep(&sym, 1000)
                    .iter()
                    .map(|p| p.1)
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(v.status.is_stable(), min >= -1e-7, "({l},{r}) min {min}");
            }
        }
    }

    #[test]
    fn trace_positive_stencils_respect_barrier() {
        for l in 1..=14u32 {
            for r in 0..l {
                let v = classify(&st(l, r));
                let strict = sign_on_interval(&v.conditions.trace.residual, &int(-1), &int(1), true).sign
                    == Sign::StrictlyPositive;
                if strict {
                    assert!(barrier_bound(r as u64).admits((l - r) as i64), "({l},{r})");
                }
                if (4..=7).contains(&(l - r)) {
                    assert!(!v.status.is_stable(), "({l},{r})");
                }
            }
        }
    }

    #[test]
    fn stable_pattern_up_to_twelve() {
        for l in 1..=12u32 {
            for r in 0..l {
                let expected = l < r + 3 || (l, r) == (3, 0);
                assert_eq!(classify(&st(l, r)).status.is_stable(), expected, "({l},{r})");
            }
        }
    }

    #[test]
    fn coefficient_bound_is_sound() {
        for l in 1..=12u32 {
            for r in 0..l {
                let sym = symbols(&build_ddo(&st(l, r)));
                if !coefficient_bound_check(&sym.h_re).unwrap().0 {
                    let p = to_cos_poly(&sym.h_re).unwrap();
                    let s = sign_on_interval(&p, &int(-1), &int(1), false).sign;
                    assert!(matches!(s, Sign::Mixed | Sign::StrictlyNegative), "({l},{r})");
                }
            }
        }
    }
}
