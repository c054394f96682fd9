//! Gaussian interval probabilities and the amplitude built on them.
//!
//! An interval `Δℓ` is assigned the weight
//! `ΔP = exp(−Δℓ²/2σ²) / (σ√2π)`. Writing `a² = 1/(σ√2π)` and
//! `S₀ = mσ²/2`, an action `S` acquired in the background maps to the weight
//! `a² exp(−S/S₀)` and to the amplitude `ψ = a exp(iS/S₀)`.
//!
//! The residual functions measure, by second-order central differences on a
//! uniform 1-D grid, how well sampled fields satisfy the Hamilton–Jacobi,
//! continuity and Schrödinger equations with `ħ_eff = 2S₀`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{param, Error, Result};
use crate::math;
use crate::tensor::SymTensor2;

/// Smallest grid accepted by the residual checks.
pub const MIN_GRID_POINTS: usize = 16;

/// `ΔP(Δℓ) = exp(−Δℓ²/2σ²) / (σ√2π)`. Requires `sigma > 0`.
pub fn interval_probability(delta_ell: f64, sigma: f64) -> f64 {
    let z = delta_ell / sigma;
    math::exp(-0.5 * z * z) / (sigma * math::sqrt(TAU))
}

/// Dispersion and mass of the interval model, with the derived `a²` and `S₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalModel {
    sigma: f64,
    mass: f64,
}

impl IntervalModel {
    pub fn new(sigma: f64, mass: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(param("sigma", "must be finite and positive"));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(param("mass", "must be finite and positive"));
        }
        Ok(IntervalModel { sigma, mass })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `a² = 1/(σ√2π)`.
    pub fn a_sq(&self) -> f64 {
        1.0 / (self.sigma * math::sqrt(TAU))
    }

    /// `S₀ = mσ²/2`.
    pub fn s0(&self) -> f64 {
        self.mass * self.sigma * self.sigma / 2.0
    }
}

/// `a² exp(−S/S₀)`.
pub fn action_probability(action: f64, model: &IntervalModel) -> f64 {
    model.a_sq() * math::exp(-action / model.s0())
}

/// Energy form `a² exp(−W/(mσ²))`, i.e. [`action_probability`] at `S = W/2`.
pub fn energy_probability(energy: f64, model: &IntervalModel) -> f64 {
    action_probability(energy / 2.0, model)
}

/// Divisor of the action in the amplitude phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseDivisor {
    /// `ψ = a exp(iS/2S₀)`: consistent with `ħ_eff = 2S₀`.
    TwoS0,
    /// `ψ = a exp(iS/S₀)` as the amplitude is first written down.
    S0,
}

impl PhaseDivisor {
    pub fn value(self, s0: f64) -> f64 {
        match self {
            PhaseDivisor::TwoS0 => 2.0 * s0,
            PhaseDivisor::S0 => s0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PhaseDivisor::TwoS0 => "2S0",
            PhaseDivisor::S0 => "S0",
        }
    }
}

fn polar(r: f64, theta: f64) -> Complex64 {
    Complex64::new(r * math::cos(theta), r * math::sin(theta))
}

/// `ψ = a exp(iS/S₀)`; `|ψ|² = a²` for every action.
pub fn amplitude(action: f64, model: &IntervalModel) -> Complex64 {
    amplitude_with(action, model, PhaseDivisor::S0)
}

pub fn amplitude_with(action: f64, model: &IntervalModel, divisor: PhaseDivisor) -> Complex64 {
    polar(math::sqrt(model.a_sq()), action / divisor.value(model.s0()))
}

/// Uniform 1-D grid `x_i = x_min + i·dx`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < MIN_GRID_POINTS {
            return Err(Error::Input("grid needs at least 16 points"));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(param(
                "x_max",
                "grid bounds must be finite with x_max > x_min",
            ));
        }
        Ok(Grid { x_min, x_max, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.x(i))
    }

    /// Trapezoidal rule over the grid.
    pub fn trapezoid(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        let mut sum = 0.0;
        let mut last = 0.0;
        for (i, v) in values.into_iter().enumerate() {
            sum += if i == 0 { 0.5 * v } else { v };
            last = v;
        }
        (sum - 0.5 * last) * self.dx()
    }
}

/// Complex amplitude sampled on a grid, optionally with basis components
/// `ψ = e^m ψ_m` (component-major: `components[m][i]`).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: Grid,
    pub psi: Vec<Complex64>,
    pub components: Option<Vec<Vec<Complex64>>>,
    pub hbar_eff: f64,
}

impl WaveField {
    pub fn sample(grid: Grid, hbar_eff: f64, f: impl Fn(f64) -> Complex64) -> Self {
        WaveField {
            psi: grid.points().map(f).collect(),
            grid,
            components: None,
            hbar_eff,
        }
    }

    fn scaled(&self, s: f64) -> WaveField {
        WaveField {
            grid: self.grid,
            psi: self.psi.iter().map(|z| z * s).collect(),
            components: self.components.as_ref().map(|c| {
                c.iter()
                    .map(|m| m.iter().map(|z| z * s).collect())
                    .collect()
            }),
            hbar_eff: self.hbar_eff,
        }
    }
}

/// Per-point weight used by [`normalize_wavefield`].
#[derive(Debug, Clone, Copy)]
pub enum MetricWeight<'a> {
    /// Density `w(x)|ψ|²`; `w ≡ 1` is the flat single-component case.
    Scalar(&'a [f64]),
    /// Density `Σ_mn g_mn conj(ψ_m) ψ_n` over the field's components.
    Tensor(&'a [SymTensor2]),
}

/// Weighted quadrature `∫ Σ g_mn conj(ψ_m) ψ_n dx`.
pub fn weighted_norm(field: &WaveField, weight: MetricWeight<'_>) -> Result<f64> {
    let n = field.grid.len();
    if field.psi.len() != n {
        return Err(Error::Input("psi length does not match grid"));
    }
    match weight {
        MetricWeight::Scalar(w) => {
            if w.len() != n {
                return Err(Error::Input("weight length does not match grid"));
            }
            Ok(field
                .grid
                .trapezoid(field.psi.iter().zip(w).map(|(z, w)| w * z.norm_sqr())))
        }
        MetricWeight::Tensor(g) => {
            let comps = field
                .components
                .as_ref()
                .ok_or(Error::Input("tensor weight needs basis components"))?;
            if g.len() != n || comps.is_empty() || comps.len() > 4 {
                return Err(Error::Input("tensor weight or components malformed"));
            }
            if comps.iter().any(|c| c.len() != n) {
                return Err(Error::Input("component length does not match grid"));
            }
            let density = (0..n).map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, cm) in comps.iter().enumerate() {
                    for (k, ck) in comps.iter().enumerate() {
                        acc += cm[i].conj() * ck[i] * g[i].get(m, k);
                    }
                }
                acc.re
            });
            Ok(field.grid.trapezoid(density))
        }
    }
}

/// Rescales `ψ` (and its components) by one positive constant so that the
/// weighted quadrature equals one.
pub fn normalize_wavefield(field: &WaveField, weight: MetricWeight<'_>) -> Result<WaveField> {
    let norm = weighted_norm(field, weight)?;
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::Normalization(norm));
    }
    Ok(field.scaled(1.0 / math::sqrt(norm)))
}

/// Action, amplitude and potential around time `t` on three slices
/// `t − dt, t, t + dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalField {
    pub grid: Grid,
    pub mass: f64,
    pub dt: f64,
    pub action: [Vec<f64>; 3],
    pub amplitude: [Vec<f64>; 3],
    pub potential: Vec<f64>,
}

impl ClassicalField {
    pub fn sample(
        grid: Grid,
        mass: f64,
        t: f64,
        dt: f64,
        action: impl Fn(f64, f64) -> f64,
        amplitude: impl Fn(f64, f64) -> f64,
        potential: impl Fn(f64) -> f64,
    ) -> Self {
        let slice = |f: &dyn Fn(f64, f64) -> f64, t: f64| grid.points().map(|x| f(x, t)).collect();
        ClassicalField {
            grid,
            mass,
            dt,
            action: [
                slice(&action, t - dt),
                slice(&action, t),
                slice(&action, t + dt),
            ],
            amplitude: [
                slice(&amplitude, t - dt),
                slice(&amplitude, t),
                slice(&amplitude, t + dt),
            ],
            potential: grid.points().map(potential).collect(),
        }
    }

    fn check(&self) -> Result<()> {
        let n = self.grid.len();
        if n < MIN_GRID_POINTS {
            return Err(Error::Input("grid needs at least 16 points"));
        }
        if self
            .action
            .iter()
            .chain(&self.amplitude)
            .any(|s| s.len() != n)
            || self.potential.len() != n
        {
            return Err(Error::Input("slice length does not match grid"));
        }
        if self.amplitude.iter().flatten().any(|&a| a < 0.0) {
            return Err(Error::Input("amplitude must be non-negative"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) || !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::Input("dt and mass must be positive"));
        }
        Ok(())
    }
}

fn max_abs(iter: impl Iterator<Item = f64>) -> Result<f64> {
    let mut m = 0.0_f64;
    for v in iter {
        if !v.is_finite() {
            return Err(Error::NonFinite("residual"));
        }
        m = m.max(v.abs());
    }
    Ok(m)
}

/// Max-norm over interior points of `∂S/∂t + (∂S/∂x)²/2m + U`.
pub fn hamilton_jacobi_residual(cf: &ClassicalField) -> Result<f64> {
    cf.check()?;
    let [prev, now, next] = &cf.action;
    let (dx, dt, m) = (cf.grid.dx(), cf.dt, cf.mass);
    max_abs((1..cf.grid.len() - 1).map(|i| {
        let s_t = (next[i] - prev[i]) / (2.0 * dt);
        let s_x = (now[i + 1] - now[i - 1]) / (2.0 * dx);
        s_t + s_x * s_x / (2.0 * m) + cf.potential[i]
    }))
}

/// Max-norm over interior points of `∂a²/∂t + ∂/∂x(a² ∂S/∂x / m)`,
/// with the divergence expanded by the product rule.
pub fn continuity_residual(cf: &ClassicalField) -> Result<f64> {
    cf.check()?;
    let [_, s, _] = &cf.action;
    let [a_prev, a, a_next] = &cf.amplitude;
    let (dx, dt, m) = (cf.grid.dx(), cf.dt, cf.mass);
    let rho = |v: &[f64], i: usize| v[i] * v[i];
    max_abs((1..cf.grid.len() - 1).map(|i| {
        let rho_t = (rho(a_next, i) - rho(a_prev, i)) / (2.0 * dt);
        let rho_x = (rho(a, i + 1) - rho(a, i - 1)) / (2.0 * dx);
        let s_x = (s[i + 1] - s[i - 1]) / (2.0 * dx);
        let s_xx = (s[i + 1] - 2.0 * s[i] + s[i - 1]) / (dx * dx);
        rho_t + (rho_x * s_x + rho(a, i) * s_xx) / m
    }))
}

/// Complex field on three slices `t − dt, t, t + dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveHistory {
    pub grid: Grid,
    pub dt: f64,
    pub hbar_eff: f64,
    pub slices: [Vec<Complex64>; 3],
}

impl WaveHistory {
    pub fn sample(
        grid: Grid,
        t: f64,
        dt: f64,
        hbar_eff: f64,
        psi: impl Fn(f64, f64) -> Complex64,
    ) -> Self {
        let slice = |t: f64| grid.points().map(|x| psi(x, t)).collect();
        WaveHistory {
            grid,
            dt,
            hbar_eff,
            slices: [slice(t - dt), slice(t), slice(t + dt)],
        }
    }

    /// Snapshot at the middle slice.
    pub fn current(&self) -> WaveField {
        WaveField {
            grid: self.grid,
            psi: self.slices[1].clone(),
            components: None,
            hbar_eff: self.hbar_eff,
        }
    }
}

/// Max-norm over interior points of
/// `i·2S₀ ∂ψ/∂t + (4S₀²/2m) ∂²ψ/∂x² − Uψ`.
pub fn schrodinger_residual(
    history: &WaveHistory,
    potential: &[f64],
    mass: f64,
    s0: f64,
) -> Result<f64> {
    let n = history.grid.len();
    if n < MIN_GRID_POINTS {
        return Err(Error::Input("grid needs at least 16 points"));
    }
    if history.slices.iter().any(|s| s.len() != n) || potential.len() != n {
        return Err(Error::Input("slice length does not match grid"));
    }
    if !(mass.is_finite() && mass > 0.0 && s0.is_finite() && s0 > 0.0) {
        return Err(Error::Input("mass and s0 must be positive"));
    }
    if !(history.dt.is_finite() && history.dt > 0.0) {
        return Err(Error::Input("dt must be positive"));
    }
    let [prev, now, next] = &history.slices;
    let (dx, dt) = (history.grid.dx(), history.dt);
    let i_unit = Complex64::new(0.0, 1.0);
    let kinetic = 4.0 * s0 * s0 / (2.0 * mass);
    max_abs((1..n - 1).map(|i| {
        let psi_t = (next[i] - prev[i]) / (2.0 * dt);
        let psi_xx = (now[i + 1] - now[i] * 2.0 + now[i - 1]) / (dx * dx);
        let r = i_unit * (2.0 * s0) * psi_t + psi_xx * kinetic - now[i] * potential[i];
        math::sqrt(r.norm_sqr())
    }))
}

/// Evaluation of one interval triple `(Δℓ21, Δℓ32, Δℓ31)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleReport {
    pub intervals: [f64; 3],
    pub p21: f64,
    pub p32: f64,
    pub p31: f64,
    /// `P21 + P32 ≤ P31 + 1`.
    pub slack_reading_holds: bool,
    /// `P21 + P32 ≤ P31`, reported only.
    pub literal_reading_holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub sigma: f64,
    pub scan_points: usize,
    /// `ΔP` never increases along the scan of `|Δℓ|`.
    pub non_increasing: bool,
    /// `ΔP` strictly decreases along the scan.
    pub strictly_decreasing: bool,
    /// `ΔP(0)`; equals one only for `σ = 1/√2π`.
    pub p_at_zero: f64,
    pub unit_at_zero: bool,
    /// `ΔP` at the far end of the scan (`10σ`) relative to `ΔP(0)`.
    pub tail_ratio: f64,
    /// `ΔP(Δℓ → ∞)` evaluated at `Δℓ = f64::MAX`.
    pub p_at_infinity: f64,
    pub triples: Vec<TripleReport>,
}

/// Span of the monotonicity scan in units of σ.
pub const AXIOM_SCAN_SIGMAS: f64 = 10.0;

/// Evaluates the interval-probability requirements on a scan of
/// `scan_points` values of `|Δℓ| ∈ [0, 10σ]` and on the given triples.
pub fn check_probability_axioms(
    sigma: f64,
    triples: &[[f64; 3]],
    scan_points: usize,
) -> Result<AxiomReport> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(param("sigma", "must be finite and positive"));
    }
    if scan_points < 2 {
        return Err(param("scan_points", "must be at least 2"));
    }
    let scan: Vec<f64> = (0..scan_points)
        .map(|i| {
            let d = AXIOM_SCAN_SIGMAS * sigma * i as f64 / (scan_points - 1) as f64;
            interval_probability(d, sigma)
        })
        .collect();
    let non_increasing = scan.windows(2).all(|w| w[1] <= w[0]);
    let strictly_decreasing = scan.windows(2).all(|w| w[1] < w[0]);

    let mut reports = Vec::with_capacity(triples.len());
    for &t in triples {
        let [d21, d32, d31] = t;
        if !t.iter().all(|d| d.is_finite() && *d >= 0.0) {
            return Err(Error::Input(
                "triple entries must be finite and non-negative",
            ));
        }
        if d21 + d32 < d31 {
            return Err(Error::Input("triple violates Δℓ21 + Δℓ32 ≥ Δℓ31"));
        }
        let (p21, p32, p31) = (
            interval_probability(d21, sigma),
            interval_probability(d32, sigma),
            interval_probability(d31, sigma),
        );
        reports.push(TripleReport {
            intervals: t,
            p21,
            p32,
            p31,
            slack_reading_holds: p21 + p32 <= p31 + 1.0,
            literal_reading_holds: p21 + p32 <= p31,
        });
    }
    let p_at_zero = scan[0];
    Ok(AxiomReport {
        sigma,
        scan_points,
        non_increasing,
        strictly_decreasing,
        p_at_zero,
        unit_at_zero: (p_at_zero - 1.0).abs() <= 1e-12,
        tail_ratio: scan[scan_points - 1] / p_at_zero,
        p_at_infinity: interval_probability(f64::MAX, sigma),
        triples: reports,
    })
}

/// `σ` for which `ΔP(0) = 1`.
pub fn unit_peak_sigma() -> f64 {
    1.0 / math::sqrt(2.0 * PI)
}
