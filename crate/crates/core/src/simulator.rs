//! Method-of-lines simulation of `u_t + u_x = 0` on the periodic unit interval.
//!
//! Nodes sit at `x_j = j h` and cell `j` is `[x_j, x_{j+1}]`. The hybrid-variable state is
//! `(u_0..u_{N-1}, ū_0..ū_{N-1})`; the Hermite state is `(ū_0..ū_{N-1}, v̄_0..v̄_{N-1})`
//! with `v̄` the cell averages of `u_x`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
use num_traits::Zero;

use crate::ddo::{build_ddo, symbols, DdoCoefficients, Stencil};
use crate::exactnum::{int, to_f64};
use crate::hermite_weno::{eigenvalues2, flux_coeffs, hermite_fundamentals, hweno_semidiscrete_matrix, Matrix2};
use crate::stability::symbol_roots;

/// Norm above which a run is declared divergent.
pub const DIVERGENCE_NORM: f64 = 1e150;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("solution diverged at t = {time} (growth rate {growth_rate} before overflow)")]
    Diverged { time: f64, growth_rate: f64 },
    #[error("cannot parse initial condition")]
    BadInitialCondition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Hv,
    Hweno,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Hv => "hv",
            Scheme::Hweno => "hweno",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// `sin(2π k x)`.
    Sine(u32),
    /// Periodic Gaussian `exp(-((x - 1/2)/w)^2)`.
    Gaussian(f64),
    /// Gaussian envelope times `cos(2π k x)`.
    Packet(u32, f64),
}

impl fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCondition::Sine(k) => write!(f, "sine:{k}"),
            InitialCondition::Gaussian(w) => write!(f, "gaussian:{w}"),
            InitialCondition::Packet(k, w) => write!(f, "packet:{k},{w}"),
        }
    }
}

impl FromStr for InitialCondition {
    type Err = SimError;

    /// `sine:K`, `gaussian:W` or `packet:K,W`.
    fn from_str(s: &str) -> Result<Self, SimError> {
        let (kind, args) = s.split_once(':').ok_or(SimError::BadInitialCondition)?;
        let bad = |_| SimError::BadInitialCondition;
        let ic = match kind {
            "sine" => InitialCondition::Sine(args.trim().parse().map_err(bad)?),
            "gaussian" => InitialCondition::Gaussian(args.trim().parse().map_err(|_| SimError::BadInitialCondition)?),
            "packet" => {
                let (k, w) = args.split_once(',').ok_or(SimError::BadInitialCondition)?;
                InitialCondition::Packet(
                    k.trim().parse().map_err(bad)?,
                    w.trim().parse().map_err(|_| SimError::BadInitialCondition)?,
                )
            }
            _ => return Err(SimError::BadInitialCondition),
        };
        match ic {
            InitialCondition::Sine(0) => Err(SimError::BadInitialCondition),
            InitialCondition::Gaussian(w) | InitialCondition::Packet(_, w) if !(w > 0.0 && w.is_finite()) => {
                Err(SimError::BadInitialCondition)
            }
            _ => Ok(ic),
        }
    }
}

const IMAGES: i32 = 3;

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

impl InitialCondition {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            InitialCondition::Sine(k) => libm::sin(2.0 * PI * k as f64 * x),
            InitialCondition::Gaussian(w) => envelope(x, w),
            InitialCondition::Packet(k, w) => envelope(x, w) * libm::cos(2.0 * PI * k as f64 * x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            InitialCondition::Sine(k) => {
                let c = 2.0 * PI * k as f64;
                c * libm::cos(c * x)
            }
            InitialCondition::Gaussian(w) => envelope_prime(x, w),
            InitialCondition::Packet(k, w) => {
                let c = 2.0 * PI * k as f64;
                envelope_prime(x, w) * libm::cos(c * x) - envelope(x, w) * c * libm::sin(c * x)
            }
        }
    }

    /// Mean over `[a, a + h]`.
    pub fn cell_average(&self, a: f64, h: f64) -> f64 {
        match *self {
            InitialCondition::Sine(k) => {
                let c = 2.0 * PI * k as f64;
                (libm::cos(c * a) - libm::cos(c * (a + h))) / (c * h)
            }
            InitialCondition::Gaussian(w) => {
                let s: f64 = (-IMAGES..=IMAGES)
                    .map(|n| {
                        let c = 0.5 - n as f64;
                        libm::erf((a + h - c) / w) - libm::erf((a - c) / w)
                    })
                    .sum();
                s * w * libm::sqrt(PI) / (2.0 * h)
            }
            InitialCondition::Packet(..) => {
                let mid = a + 0.5 * h;
                let s: f64 = GL_NODES
                    .iter()
                    .zip(GL_WEIGHTS)
                    .map(|(&x, wt)| wt * (self.value(mid + 0.5 * h * x) + self.value(mid - 0.5 * h * x)))
                    .sum();
                0.5 * s
            }
        }
    }
}

fn envelope(x: f64, w: f64) -> f64 {
    (-IMAGES..=IMAGES)
        .map(|n| {
            let s = (x - 0.5 + n as f64) / w;
            libm::exp(-s * s)
        })
        .sum()
}

fn envelope_prime(x: f64, w: f64) -> f64 {
    (-IMAGES..=IMAGES)
        .map(|n| {
            let s = (x - 0.5 + n as f64) / w;
            -2.0 * s / w * libm::exp(-s * s)
        })
        .sum()
}

/// Periodic block-circulant operator on `2N` unknowns:
/// `out_a[j] = Σ_b Σ_(k, w) w · x_b[(j + k) mod N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantOp {
    pub n: usize,
    pub blocks: [[Vec<(i64, f64)>; 2]; 2],
}

impl CirculantOp {
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n as i64;
        for a in 0..2 {
            for j in 0..self.n {
                let mut acc = 0.0;
                for b in 0..2 {
                    for &(k, w) in &self.blocks[a][b] {
                        let idx = (j as i64 + k).rem_euclid(n) as usize;
                        acc += w * x[b * self.n + idx];
                    }
                }
                out[a * self.n + j] = acc;
            }
        }
    }

    pub fn apply_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        let re: Vec<f64> = x.iter().map(|z| z.re).collect();
        let im: Vec<f64> = x.iter().map(|z| z.im).collect();
        let mut ore = alloc::vec![0.0; x.len()];
        let mut oim = alloc::vec![0.0; x.len()];
        self.apply(&re, &mut ore);
        self.apply(&im, &mut oim);
        ore.into_iter().zip(oim).map(|(a, b)| Complex64::new(a, b)).collect()
    }

    /// The `2×2` symbol at `θ`: applying the operator to `(p, q) e^{ijθ}` gives `S (p, q) e^{ijθ}`.
    pub fn symbol(&self, theta: f64) -> Matrix2 {
        let mut s = [[Complex64::zero(); 2]; 2];
        for (a, row) in self.blocks.iter().enumerate() {
            for (b, terms) in row.iter().enumerate() {
                s[a][b] = terms
                    .iter()
                    .map(|&(k, w)| Complex64::from_polar(w, k as f64 * theta))
                    .sum();
            }
        }
        s
    }
}

/// Adds `w (x[j+k] - x[j])` terms.
fn push_difference(terms: &mut Vec<(i64, f64)>, k: i64, w: f64) {
    terms.push((k, w));
    terms.push((0, -w));
}

/// `u_j' = -(Σ α_k ū_{j+k} + Σ β_k u_{j+k}) / h`, `ū_j' = -(u_{j+1} - u_j) / h`.
pub fn assemble_hv_rhs(d: &DdoCoefficients, n: usize) -> CirculantOp {
    let h = 1.0 / n as f64;
    let beta = d.beta.iter().map(|(&k, b)| (k, -to_f64(b) / h)).collect();
    let alpha = d.alpha.iter().map(|(&k, a)| (k, -to_f64(a) / h)).collect();
    let diff = alloc::vec![(1, -1.0 / h), (0, 1.0 / h)];
    CirculantOp {
        n,
        blocks: [[beta, alpha], [diff, Vec::new()]],
    }
}

/// Conservative Hermite update with optimal flux weights on `-l..=r`.
pub fn assemble_hweno_rhs(l: u32, r: u32, n: usize) -> CirculantOp {
    let h = 1.0 / n as f64;
    let fund = hermite_fundamentals(l, r);
    let flux = flux_coeffs(l, r);
    let b0: crate::exactnum::Rational = fund.g2pp.values().sum();
    let mut blocks: [[Vec<(i64, f64)>; 2]; 2] = Default::default();
    for (&k, c) in &flux.c {
        let cz = int(2) * c * &fund.lprime[&k];
        push_difference(&mut blocks[0][0], k, -to_f64(&cz) / h);
        push_difference(&mut blocks[0][1], k, to_f64(c));
        push_difference(&mut blocks[1][0], k, -to_f64(&(&fund.h2pp[&k] + &cz * &b0)) / (h * h));
        push_difference(&mut blocks[1][1], k, -to_f64(&(&fund.g2pp[&k] - c * &b0)) / h);
    }
    CirculantOp { n, blocks }
}

/// Hybrid-variable symbol `A(θ)` with `y' = -(1/h) A y` for `y = (û, ū̂)`.
pub fn hv_symbol_matrix(d: &DdoCoefficients, theta: f64) -> Matrix2 {
    let e = |k: i64| Complex64::from_polar(1.0, k as f64 * theta);
    let h: Complex64 = d.beta.iter().map(|(&k, b)| e(k) * to_f64(b)).sum();
    let g: Complex64 = d.alpha.iter().map(|(&k, a)| e(k) * to_f64(a)).sum();
    [[h, g], [e(1) - 1.0, Complex64::zero()]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub scheme: Scheme,
    /// `(L, R)` for hybrid-variable runs, `(l, r)` for Hermite runs.
    pub left: u32,
    pub right: u32,
    pub n: usize,
    pub cfl: f64,
    pub t_final: f64,
    pub ic: InitialCondition,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.left + self.right == 0 {
            return Err(SimError::InvalidConfig("empty stencil"));
        }
        if self.n < 2 * (self.left + self.right) as usize {
            return Err(SimError::InvalidConfig("N must be at least twice the stencil width"));
        }
        if !(self.cfl > 0.0 && self.cfl <= 2.0) {
            return Err(SimError::InvalidConfig("cfl must lie in (0, 2]"));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(SimError::InvalidConfig("t_final must be positive"));
        }
        Ok(())
    }

    fn ddo(&self) -> DdoCoefficients {
        build_ddo(&Stencil::from_lr(self.left, self.right).expect("validated stencil"))
    }

    pub fn operator(&self) -> CirculantOp {
        match self.scheme {
            Scheme::Hv => assemble_hv_rhs(&self.ddo(), self.n),
            Scheme::Hweno => assemble_hweno_rhs(self.left, self.right, self.n),
        }
    }

    /// Eigenvalues `μ` of the semi-discrete system `y' = μ y`, two per Fourier mode.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let h = 1.0 / self.n as f64;
        let thetas = (0..self.n).map(|m| 2.0 * PI * m as f64 / self.n as f64);
        let mut out = Vec::with_capacity(2 * self.n);
        match self.scheme {
            Scheme::Hv => {
                let sym = symbols(&self.ddo());
                for th in thetas {
                    let (a, b) = symbol_roots(&sym, th);
                    out.push(-a / h);
                    out.push(-b / h);
                }
            }
            Scheme::Hweno => {
                for th in thetas {
                    let (a, b) = eigenvalues2(&hweno_semidiscrete_matrix(self.left, self.right, th));
                    out.push(-a / h);
                    out.push(-b / h);
                }
            }
        }
        out
    }

    pub fn initial_state(&self) -> Vec<f64> {
        self.exact_state(0.0)
    }

    /// The exact solution translated to time `t`, in the scheme's state layout.
    pub fn exact_state(&self, t: f64) -> Vec<f64> {
        let n = self.n;
        let h = 1.0 / n as f64;
        let at = |j: usize| (j as f64 * h - t).rem_euclid(1.0);
        let mut s = alloc::vec![0.0; 2 * n];
        for j in 0..n {
            match self.scheme {
                Scheme::Hv => {
                    s[j] = self.ic.value(at(j));
                    s[n + j] = self.ic.cell_average(at(j), h);
                }
                Scheme::Hweno => {
                    let a = at(j);
                    s[j] = self.ic.cell_average(a, h);
                    s[n + j] = (self.ic.value(a + h) - self.ic.value(a)) / h;
                }
            }
        }
        s
    }
}

fn rk4_amplification(z: Complex64) -> Complex64 {
    1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)))
}

/// Largest `cfl · h / 2^k` for which RK4 does not amplify any non-growing mode.
pub fn safe_time_step(cfg: &SimConfig) -> f64 {
    let h = 1.0 / cfg.n as f64;
    let spectrum = cfg.spectrum();
    let mut dt = cfg.cfl * h;
    for _ in 0..30 {
        let ok = spectrum
            .iter()
            .filter(|mu| mu.re <= 0.0)
            .all(|mu| rk4_amplification(mu * dt).norm() <= 1.0 + 1e-12);
        if ok {
            break;
        }
        dt *= 0.5;
    }
    dt
}

/// Fourier mode with the largest growth rate and that rate, `max Re μ`.
pub fn least_stable_mode(cfg: &SimConfig) -> (u32, f64) {
    let spectrum = cfg.spectrum();
    let mut best = (1u32, f64::NEG_INFINITY);
    for m in 1..=cfg.n / 2 {
        let rate = spectrum[2 * m].re.max(spectrum[2 * m + 1].re);
        if rate > best.1 {
            best = (m as u32, rate);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub times: Vec<f64>,
    pub l2_norm: Vec<f64>,
    /// Maximum error of the primary unknown (nodes for hybrid-variable, cell averages for Hermite).
    pub final_error: f64,
    /// Least-squares slope of `ln ‖y‖` against `t`.
    pub growth_rate: f64,
    pub dt: f64,
    pub steps: usize,
}

fn l2(y: &[f64], h: f64) -> f64 {
    libm::sqrt(h * y.iter().map(|v| v * v).sum::<f64>())
}

/// Least-squares slope of `ln y` against `t`.
pub fn log_slope(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    if t.len() < 2 {
        return 0.0;
    }
    let ly: Vec<f64> = y.iter().map(|v| libm::log(*v)).collect();
    let mt = t.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = t.iter().zip(&ly).map(|(a, b)| (a - mt) * (b - my)).sum();
    let den: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    num / den
}

fn axpy(out: &mut [f64], y: &[f64], a: f64, k: &[f64]) {
    for ((o, yi), ki) in out.iter_mut().zip(y).zip(k) {
        *o = yi + a * ki;
    }
}

pub fn simulate(cfg: &SimConfig) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let op = cfg.operator();
    let h = 1.0 / cfg.n as f64;
    let dt0 = safe_time_step(cfg);
    let steps = libm::ceil(cfg.t_final / dt0) as usize;
    let dt = cfg.t_final / steps as f64;
    let dim = op.dim();
    let mut y = cfg.initial_state();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        alloc::vec![0.0; dim],
        alloc::vec![0.0; dim],
        alloc::vec![0.0; dim],
        alloc::vec![0.0; dim],
        alloc::vec![0.0; dim],
    );
    let mut times = alloc::vec![0.0];
    let mut norms = alloc::vec![l2(&y, h)];
    for s in 1..=steps {
        op.apply(&y, &mut k1);
        axpy(&mut tmp, &y, 0.5 * dt, &k1);
        op.apply(&tmp, &mut k2);
        axpy(&mut tmp, &y, 0.5 * dt, &k2);
        op.apply(&tmp, &mut k3);
        axpy(&mut tmp, &y, dt, &k3);
        op.apply(&tmp, &mut k4);
        for i in 0..dim {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t = s as f64 * dt;
        let norm = l2(&y, h);
        if !norm.is_finite() || norm > DIVERGENCE_NORM {
            return Err(SimError::Diverged {
                time: t,
                growth_rate: log_slope(&times, &norms),
            });
        }
        times.push(t);
        norms.push(norm);
    }
    let exact = cfg.exact_state(cfg.t_final);
    let final_error = y[..cfg.n]
        .iter()
        .zip(&exact[..cfg.n])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let growth_rate = log_slope(&times, &norms);
    Ok(SimResult {
        times,
        l2_norm: norms,
        final_error,
        growth_rate,
        dt,
        steps,
    })
}

/// Growth rate of a run, taken from the divergence diagnostic when the run overflows.
pub fn growth_rate(cfg: &SimConfig) -> Result<f64, SimError> {
    match simulate(cfg) {
        Ok(r) => Ok(r.growth_rate),
        Err(SimError::Diverged { growth_rate, .. }) => Ok(growth_rate),
        Err(e) => Err(e),
    }
}

/// Observed convergence order from errors on successively doubled grids.
pub fn observed_order(errors: &[f64]) -> f64 {
    let logs: Vec<f64> = errors.iter().map(|e| libm::log2(*e)).collect();
    let xs: Vec<f64> = (0..errors.len()).map(|i| i as f64).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = logs.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&logs).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = xs.iter().map(|a| (a - mx) * (a - mx)).sum();
    -num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hv_cfg(l: u32, r: u32, n: usize, cfl: f64, t: f64, ic: InitialCondition) -> SimConfig {
        SimConfig {
            scheme: Scheme::Hv,
            left: l,
            right: r,
            n,
            cfl,
            t_final: t,
            ic,
        }
    }

    fn mode(n: usize, m: usize, amp: [Complex64; 2]) -> Vec<Complex64> {
        let th = 2.0 * PI * m as f64 / n as f64;
        let mut v = alloc::vec![Complex64::zero(); 2 * n];
        for j in 0..n {
            let e = Complex64::from_polar(1.0, j as f64 * th);
            v[j] = amp[0] * e;
            v[n + j] = amp[1] * e;
        }
        v
    }

    fn check_mode(op: &CirculantOp, m: usize, pred: [Complex64; 2], amp: [Complex64; 2], tol: f64) {
        let n = op.n;
        let got = op.apply_complex(&mode(n, m, amp));
        let want = mode(n, m, pred);
        let scale = 1.0 + want.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() <= tol * scale, "mode {m}: {a} vs {b}");
        }
    }

    #[test]
    fn hv_constant_state_is_steady() {
        let op = assemble_hv_rhs(&build_ddo(&Stencil::from_lr(4, 3).unwrap()), 32);
        let mut out = alloc::vec![0.0; 64];
        op.apply(&alloc::vec![1.0; 64], &mut out);
        assert!(out.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn hv_fourier_diagonalization() {
        let d = build_ddo(&Stencil::from_lr(4, 3).unwrap());
        let n = 32;
        let op = assemble_hv_rhs(&d, n);
        let h = 1.0 / n as f64;
        let amp = [Complex64::new(0.3, -0.7), Complex64::new(1.1, 0.2)];
        for m in 1..n / 2 {
            let th = 2.0 * PI * m as f64 / n as f64;
            let a = hv_symbol_matrix(&d, th);
            let pred = [
                -(a[0][0] * amp[0] + a[0][1] * amp[1]) / h,
                -(a[1][0] * amp[0] + a[1][1] * amp[1]) / h,
            ];
            check_mode(&op, m, pred, amp, 1e-10);
            let s = op.symbol(th);
            assert!((s[0][0] + a[0][0] / h).norm() < 1e-9);
        }
    }

    #[test]
    fn hweno_constant_state_is_steady() {
        let op = assemble_hweno_rhs(2, 1, 32);
        let mut y = alloc::vec![1.0; 64];
        y[32..].iter_mut().for_each(|v| *v = 0.0);
        let mut out = alloc::vec![0.0; 64];
        op.apply(&y, &mut out);
        assert!(out.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn hweno_fourier_diagonalization() {
        for (l, r) in [(1, 1), (3, 0), (2, 2)] {
            let n = 32;
            let op = assemble_hweno_rhs(l, r, n);
            let h = 1.0 / n as f64;
            let (u, v) = (Complex64::new(0.4, 0.1), Complex64::new(-0.2, 0.9));
            for m in 1..n / 2 {
                let th = 2.0 * PI * m as f64 / n as f64;
                let mm = hweno_semidiscrete_matrix(l, r, th);
                let i_th = Complex64::new(0.0, th);
                let w = v * h / i_th;
                let du = -(mm[0][0] * u + mm[0][1] * w) / h;
                let dw = -(mm[1][0] * u + mm[1][1] * w) / h;
                let dv = dw * i_th / h;
                check_mode(&op, m, [du, dv], [u, v], 1e-10);
            }
        }
    }

    #[test]
    fn hv_truncation_order() {
        let d = build_ddo(&Stencil::from_lr(4, 3).unwrap());
        let mut errs = Vec::new();
        for n in [16usize, 32, 64] {
            let cfg = hv_cfg(4, 3, n, 0.4, 1.0, InitialCondition::Sine(1));
            let op = assemble_hv_rhs(&d, n);
            let y = cfg.initial_state();
            let mut out = alloc::vec![0.0; 2 * n];
            op.apply(&y, &mut out);
            let h = 1.0 / n as f64;
            let e = (0..n)
                .map(|j| (out[j] + InitialCondition::Sine(1).derivative(j as f64 * h)).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        assert!(observed_order(&errs) > 6.5, "{errs:?}");
    }

    #[test]
    fn hweno_consistency() {
        let mut errs = Vec::new();
        for n in [16usize, 32, 64] {
            let cfg = SimConfig {
                scheme: Scheme::Hweno,
                left: 2,
                right: 1,
                n,
                cfl: 0.4,
                t_final: 1.0,
                ic: InitialCondition::Sine(1),
            };
            let op = cfg.operator();
            let y = cfg.initial_state();
            let mut out = alloc::vec![0.0; 2 * n];
            op.apply(&y, &mut out);
            let dt = 1e-6;
            let ahead = cfg.exact_state(dt);
            let behind = cfg.exact_state(-dt);
            let e = (0..2 * n)
                .map(|i| (out[i] - (ahead[i] - behind[i]) / (2.0 * dt)).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        assert!(errs[2] < errs[0] / 8.0, "{errs:?}");
    }

    #[test]
    fn initial_condition_averages() {
        let h = 1.0 / 64.0;
        for ic in [
            InitialCondition::Sine(2),
            InitialCondition::Gaussian(0.08),
            InitialCondition::Packet(3, 0.1),
        ] {
            for j in [0usize, 17, 40] {
                let a = j as f64 * h;
                let fine: f64 = (0..4000)
                    .map(|i| ic.value(a + (i as f64 + 0.5) * h / 4000.0))
                    .sum::<f64>()
                    / 4000.0;
                assert!((ic.cell_average(a, h) - fine).abs() < 1e-8, "{ic}");
            }
        }
        assert!(
            (InitialCondition::Gaussian(0.1).value(0.0) - InitialCondition::Gaussian(0.1).value(1.0)).abs() < 1e-14
        );
    }

    #[test]
    fn parse_initial_conditions() {
        assert_eq!("sine:1".parse::<InitialCondition>().unwrap(), InitialCondition::Sine(1));
        assert_eq!(
            "gaussian:0.05".parse::<InitialCondition>().unwrap(),
            InitialCondition::Gaussian(0.05)
        );
        assert_eq!(
            "packet:8,0.1".parse::<InitialCondition>().unwrap(),
            InitialCondition::Packet(8, 0.1)
        );
        assert!("sine".parse::<InitialCondition>().is_err());
        assert!("sine:0".parse::<InitialCondition>().is_err());
        assert!("gaussian:-1".parse::<InitialCondition>().is_err());
        assert!("cosine:1".parse::<InitialCondition>().is_err());
    }

    #[test]
    fn config_validation() {
        let ok = hv_cfg(4, 3, 64, 0.4, 5.0, InitialCondition::Sine(1));
        assert!(ok.validate().is_ok());
        assert!(hv_cfg(4, 3, 10, 0.4, 5.0, InitialCondition::Sine(1))
            .validate()
            .is_err());
        assert!(hv_cfg(4, 3, 64, 0.0, 5.0, InitialCondition::Sine(1))
            .validate()
            .is_err());
        assert!(hv_cfg(4, 3, 64, 2.5, 5.0, InitialCondition::Sine(1))
            .validate()
            .is_err());
        assert!(hv_cfg(4, 3, 64, 0.4, 0.0, InitialCondition::Sine(1))
            .validate()
            .is_err());
    }

    #[test]
    fn stable_run_does_not_grow() {
        let r = simulate(&hv_cfg(4, 3, 64, 0.4, 5.0, InitialCondition::Sine(1))).unwrap();
        assert!(r.l2_norm.last().unwrap() / r.l2_norm[0] <= 1.0 + 1e-6);
        assert_eq!(r.times.len(), r.l2_norm.len());
    }

    #[test]
    fn mass_is_conserved() {
        for scheme in [Scheme::Hv, Scheme::Hweno] {
            let cfg = SimConfig {
                scheme,
                left: 3,
                right: 1,
                n: 32,
                cfl: 0.4,
                t_final: 0.05,
                ic: InitialCondition::Gaussian(0.1),
            };
            let op = cfg.operator();
            let y = cfg.initial_state();
            let mut out = alloc::vec![0.0; 64];
            op.apply(&y, &mut out);
            let idx = if scheme == Scheme::Hv { 32..64 } else { 0..32 };
            let total: f64 = out[idx].iter().sum();
            assert!(total.abs() < 1e-10, "{total}");
        }
    }

    #[test]
    fn unstable_hweno_grows() {
        let cfg = SimConfig {
            scheme: Scheme::Hweno,
            left: 3,
            right: 0,
            n: 64,
            cfl: 0.4,
            t_final: 5.0,
            ic: InitialCondition::Sine(1),
        };
        let (m, rate) = least_stable_mode(&cfg);
        assert!(rate > 0.0);
        let cfg = SimConfig {
            ic: InitialCondition::Sine(m),
            ..cfg
        };
        assert!(growth_rate(&cfg).unwrap() > 1e-4);
    }

    #[test]
    fn divergence_reports_growth() {
        let cfg = hv_cfg(6, 0, 64, 0.05, 50.0, InitialCondition::Sine(1));
        let (m, _) = least_stable_mode(&cfg);
        match simulate(&SimConfig {
            ic: InitialCondition::Sine(m),
            ..cfg
        }) {
            Err(SimError::Diverged { growth_rate, .. }) => assert!(growth_rate > 1.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn order_from_errors() {
        assert!((observed_order(&[1.0, 0.125, 0.015625]) - 3.0).abs() < 1e-12);
    }
}
