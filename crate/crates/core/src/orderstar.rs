//! Order-star scans for finite difference and hybrid-variable schemes.
//!
//! A point `z` is shaded when `Re(λ(z) - z) < 0`. For hybrid-variable schemes `λ` solves
//! `λ^2 - H λ - F = 0` with `H = Σ β_k e^{kz}` and `F = (e^z - 1) Σ α_k e^{kz}`, giving two sheets.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::ddo::SchemeSymbols;
use crate::exactnum::{frac, int, pow_i, solve_linear, to_f64, ExactError, Rational};
use crate::trigpoly::{Laurent, TrigPoly};

/// Margin below zero required for a point to count as shaded on a grid.
pub const SHADE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("x_min must be below x_max")]
    EmptyWindow,
    #[error("nx and ny must be at least 2")]
    TooCoarse,
}

/// Window `[x_min, x_max] × [-π, π]` sampled on an inclusive `nx × ny` lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, nx: usize, ny: usize) -> Result<Self, GridError> {
        if !(x_min < x_max) {
            return Err(GridError::EmptyWindow);
        }
        if nx < 2 || ny < 2 {
            return Err(GridError::TooCoarse);
        }
        Ok(GridSpec { x_min, x_max, nx, ny })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        -PI + 2.0 * PI * j as f64 / (self.ny - 1) as f64
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x_min && z.re <= self.x_max && z.im >= -PI && z.im <= PI
    }

    fn spans_axis(&self) -> bool {
        self.x_min <= 0.0 && self.x_max >= 0.0
    }
}

/// Shading of one sheet. `shaded[j][i]` refers to `(x(i), y(j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sheet {
    pub shaded: Vec<Vec<bool>>,
    /// Shading on `Re z = 0` at each `y(j)`, when the window spans the axis.
    pub axis: Option<Vec<bool>>,
}

impl Sheet {
    pub fn shaded_count(&self) -> usize {
        self.shaded.iter().flatten().filter(|&&s| s).count()
    }

    pub fn axis_shaded_count(&self) -> usize {
        self.axis.as_ref().map_or(0, |a| a.iter().filter(|&&s| s).count())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderStarGrid {
    pub spec: GridSpec,
    pub sheets: Vec<Sheet>,
    pub branch_points: Vec<Complex64>,
}

/// Optimal-order first-derivative weights on nodes `-l..=r`.
pub fn fdm_weights(l: u32, r: u32) -> Result<Laurent, ExactError> {
    let nodes: Vec<i64> = (-(l as i64)..=r as i64).collect();
    let n = nodes.len();
    let a = (0..n)
        .map(|q| {
            nodes
                .iter()
                .map(|&k| {
                    if q == 0 {
                        Rational::one()
                    } else {
                        pow_i(&int(k), q as i64)
                    }
                })
                .collect()
        })
        .collect();
    let b = (0..n)
        .map(|q| if q == 1 { Rational::one() } else { Rational::zero() })
        .collect();
    let w = solve_linear(a, b)?;
    Ok(nodes.into_iter().zip(w).collect())
}

fn float_terms(w: &Laurent) -> Vec<(f64, f64)> {
    w.iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(&k, v)| (k as f64, to_f64(v)))
        .collect()
}

fn exp_sum(terms: &[(f64, f64)], z: Complex64) -> Complex64 {
    terms.iter().map(|&(k, a)| (z * k).exp() * a).sum()
}

fn exp_sum_prime(terms: &[(f64, f64)], z: Complex64) -> Complex64 {
    terms.iter().map(|&(k, a)| (z * k).exp() * (a * k)).sum()
}

/// `e^z - 1` without cancellation near the origin.
fn expm1(z: Complex64) -> Complex64 {
    let s = libm::sin(z.im / 2.0);
    let re = libm::expm1(z.re) * libm::cos(z.im) - 2.0 * s * s;
    Complex64::new(re, libm::exp(z.re) * libm::sin(z.im))
}

/// `λ(z) = Σ a_k e^{kz}` for a finite difference scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct FdmSymbol {
    terms: Vec<(f64, f64)>,
}

impl FdmSymbol {
    pub fn new(weights: &Laurent) -> Self {
        FdmSymbol {
            terms: float_terms(weights),
        }
    }

    pub fn lambda(&self, z: Complex64) -> Complex64 {
        exp_sum(&self.terms, z)
    }

    pub fn sigma(&self, z: Complex64) -> Complex64 {
        self.lambda(z) - z
    }
}

/// Recovers Laurent coefficients from the real and imaginary parts of `Σ c_k e^{ikθ}`.
fn laurent_from_parts(re: &TrigPoly, im: &TrigPoly) -> Laurent {
    let mut out = Laurent::new();
    let half = frac(1, 2);
    out.insert(0, re.cos_coeff(0));
    for k in 1..=re.degree().max(im.degree()) {
        let c = re.cos_coeff(k);
        let s = im.sin_coeff(k);
        out.insert(k as i64, (&c + &s) * &half);
        out.insert(-(k as i64), (&c - &s) * &half);
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Floating-point evaluator for `H`, `F` and the two roots at complex `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct HvSymbol {
    beta: Vec<(f64, f64)>,
    alpha: Vec<(f64, f64)>,
}

impl HvSymbol {
    pub fn new(sym: &SchemeSymbols) -> Self {
        HvSymbol {
            beta: float_terms(&laurent_from_parts(&sym.h_re, &sym.h_im)),
            alpha: float_terms(&laurent_from_parts(&sym.g_re, &sym.g_im)),
        }
    }

    pub fn h(&self, z: Complex64) -> Complex64 {
        exp_sum(&self.beta, z)
    }

    pub fn f(&self, z: Complex64) -> Complex64 {
        expm1(z) * exp_sum(&self.alpha, z)
    }

    pub fn discriminant(&self, z: Complex64) -> Complex64 {
        let h = self.h(z);
        h * h + self.f(z) * 4.0
    }

    fn discriminant_prime(&self, z: Complex64) -> Complex64 {
        let h = self.h(z);
        let hp = exp_sum_prime(&self.beta, z);
        let fp = z.exp() * exp_sum(&self.alpha, z) + expm1(z) * exp_sum_prime(&self.alpha, z);
        h * hp * 2.0 + fp * 4.0
    }

    /// `(λ₊, λ₋) = ((H + √d)/2, (H - √d)/2)` with the principal root, the smaller one via `-F/λ`.
    pub fn roots(&self, z: Complex64) -> (Complex64, Complex64) {
        let h = self.h(z);
        let f = self.f(z);
        let s = (h * h + f * 4.0).sqrt();
        let plus = (h + s) * 0.5;
        let minus = (h - s) * 0.5;
        if plus.norm() >= minus.norm() {
            let other = if plus.is_zero() { minus } else { -f / plus };
            (plus, other)
        } else {
            (-f / minus, minus)
        }
    }
}

fn shade(sigma: Complex64) -> bool {
    sigma.re < -SHADE_TOL
}

fn scan<const N: usize>(spec: &GridSpec, eval: impl Fn(Complex64) -> [Complex64; N]) -> Vec<Sheet> {
    let mut shaded = alloc::vec![alloc::vec![alloc::vec![false; spec.nx]; spec.ny]; N];
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let z = Complex64::new(spec.x(i), spec.y(j));
            for (s, v) in eval(z).iter().enumerate() {
                shaded[s][j][i] = shade(*v);
            }
        }
    }
    let mut axis = alloc::vec![Vec::new(); N];
    if spec.spans_axis() {
        for j in 0..spec.ny {
            for (s, v) in eval(Complex64::new(0.0, spec.y(j))).iter().enumerate() {
                axis[s].push(shade(*v));
            }
        }
    }
    shaded
        .into_iter()
        .zip(axis)
        .map(|(shaded, a)| Sheet {
            shaded,
            axis: if spec.spans_axis() { Some(a) } else { None },
        })
        .collect()
}

pub fn fdm_orderstar(weights: &Laurent, spec: &GridSpec) -> OrderStarGrid {
    let sym = FdmSymbol::new(weights);
    let sheets = scan(spec, |z| [sym.sigma(z)]);
    OrderStarGrid {
        spec: *spec,
        sheets,
        branch_points: Vec::new(),
    }
}

pub fn hv_orderstar(sym: &SchemeSymbols, spec: &GridSpec) -> OrderStarGrid {
    let hv = HvSymbol::new(sym);
    let sheets = scan(spec, |z| {
        let (p, m) = hv.roots(z);
        [p - z, m - z]
    });
    let branch_points = branch_points(&hv, spec);
    OrderStarGrid {
        spec: *spec,
        sheets,
        branch_points,
    }
}

/// Zeros of `H^2 + 4F` in the window, from Newton iterations seeded at grid-local minima of `|d|`.
pub fn branch_points(hv: &HvSymbol, spec: &GridSpec) -> Vec<Complex64> {
    let mag: Vec<Vec<f64>> = (0..spec.ny)
        .map(|j| {
            (0..spec.nx)
                .map(|i| hv.discriminant(Complex64::new(spec.x(i), spec.y(j))).norm())
                .collect()
        })
        .collect();
    let mut found: Vec<Complex64> = Vec::new();
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let v = mag[j][i];
            let is_min = (-1i64..=1).all(|dj| {
                (-1i64..=1).all(|di| {
                    let (jj, ii) = (j as i64 + dj, i as i64 + di);
                    if (dj == 0 && di == 0) || jj < 0 || ii < 0 || jj >= spec.ny as i64 || ii >= spec.nx as i64 {
                        return true;
                    }
                    v <= mag[jj as usize][ii as usize]
                })
            });
            if !is_min {
                continue;
            }
            if let Some(z) = newton(hv, Complex64::new(spec.x(i), spec.y(j))) {
                if spec.contains(z) && hv.discriminant(z).norm() < 1e-8 && found.iter().all(|w| (w - z).norm() > 1e-6) {
                    found.push(z);
                }
            }
        }
    }
    found
}

fn newton(hv: &HvSymbol, mut z: Complex64) -> Option<Complex64> {
    for _ in 0..50 {
        let d = hv.discriminant(z);
        let dp = hv.discriminant_prime(z);
        if dp.norm() == 0.0 {
            return None;
        }
        let step = d / dp;
        z -= step;
        if !z.is_finite() {
            return None;
        }
        if step.norm() < 1e-12 {
            break;
        }
    }
    Some(z)
}

/// Shaded fraction of `samples` equally spaced points on `|z| = radius`.
fn circle_fraction(radius: f64, samples: usize, sigma: impl Fn(Complex64) -> Complex64) -> f64 {
    let hits = (0..samples)
        .filter(|&s| {
            let phi = 2.0 * PI * (s as f64 + 0.5) / samples as f64;
            sigma(Complex64::from_polar(radius, phi)).re < 0.0
        })
        .count();
    hits as f64 / samples as f64
}

pub fn fdm_sector_fraction(weights: &Laurent, radius: f64, samples: usize) -> f64 {
    let sym = FdmSymbol::new(weights);
    circle_fraction(radius, samples, |z| sym.sigma(z))
}

/// Sector fraction on the sheet through the zero root at the origin.
pub fn hv_sector_fraction(sym: &SchemeSymbols, radius: f64, samples: usize) -> f64 {
    let hv = HvSymbol::new(sym);
    circle_fraction(radius, samples, |z| {
        let (p, m) = hv.roots(z);
        let near = if (p - z).norm() <= (m - z).norm() { p } else { m };
        near - z
    })
}
