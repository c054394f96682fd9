//! Relative oscillation of a test-particle pair in the background.
//!
//! For slow particles only the `R¹₀₁₀` component of the curvature survives in
//! the deviation equation, which becomes an oscillator with a time-dependent
//! spring constant:
//!
//! ```text
//! d²ℓ/dτ² + c² R¹₀₁₀(τ) ℓ = 0
//! ```
//!
//! applied to each spatial component of the separation `ℓ`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::background::{riemann_r1010, BackgroundEnsemble};
use crate::error::{param, Error, Result};
use crate::math;
use crate::tensor::FourVector;

/// Steps per shortest period demanded by the step-size guard.
pub const STEPS_PER_PERIOD: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscillationKind {
    /// `R¹₀₁₀ > 0`: harmonic motion.
    Oscillatory,
    /// `R¹₀₁₀ < 0`: tidal stretching, `cosh`/`sinh` growth.
    Unstable,
    /// `R¹₀₁₀ = 0`: free drift.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFrequency {
    pub kind: OscillationKind,
    /// `c √|R¹₀₁₀|`; the growth rate when unstable.
    pub omega: f64,
}

/// Classifies the spring term and returns `ω = c √R¹₀₁₀`.
pub fn mode_frequency(r1010: f64, c: f64) -> ModeFrequency {
    if r1010 > 0.0 {
        ModeFrequency {
            kind: OscillationKind::Oscillatory,
            omega: c * math::sqrt(r1010),
        }
    } else if r1010 < 0.0 {
        ModeFrequency {
            kind: OscillationKind::Unstable,
            omega: c * math::sqrt(-r1010),
        }
    } else {
        ModeFrequency {
            kind: OscillationKind::Flat,
            omega: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeviationState {
    pub ell: [f64; 3],
    pub ell_dot: [f64; 3],
    pub tau: f64,
}

impl DeviationState {
    pub fn at_rest(ell: [f64; 3]) -> Self {
        DeviationState {
            ell,
            ell_dot: [0.0; 3],
            tau: 0.0,
        }
    }

    fn is_finite(&self) -> bool {
        self.tau.is_finite()
            && self.ell.iter().all(|v| v.is_finite())
            && self.ell_dot.iter().all(|v| v.is_finite())
    }
}

/// Samples on a uniform proper-time grid, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<DeviationState>,
    pub dt: f64,
    pub mode_ref: Option<usize>,
}

impl Trajectory {
    pub fn last(&self) -> &DeviationState {
        // integrate_deviation always emits at least two samples
        self.samples.last().expect("empty trajectory")
    }

    /// Component `axis` of the separation at every sample.
    pub fn ell_component(&self, axis: usize) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(move |s| s.ell[axis])
    }
}

/// Time-dependent spring term for the deviation equation.
pub trait CurvatureSource {
    fn r1010(&self, tau: f64) -> f64;

    /// Largest angular frequency the solution can contain, used by the
    /// step-size guard.
    fn max_frequency(&self, c: f64) -> f64;
}

/// Constant `R¹₀₁₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCurvature(pub f64);

impl CurvatureSource for ConstantCurvature {
    fn r1010(&self, _tau: f64) -> f64 {
        self.0
    }

    fn max_frequency(&self, c: f64) -> f64 {
        c * math::sqrt(self.0.abs())
    }
}

/// `R¹₀₁₀` of an ensemble sampled along the world line of a particle at rest
/// at `position`.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleCurvature<'a> {
    pub ensemble: &'a BackgroundEnsemble,
    pub position: [f64; 3],
}

impl CurvatureSource for EnsembleCurvature<'_> {
    fn r1010(&self, tau: f64) -> f64 {
        riemann_r1010(
            self.ensemble,
            &FourVector::from_time_space(tau, self.position),
        )
    }

    fn max_frequency(&self, c: f64) -> f64 {
        let spring = c * math::sqrt(self.ensemble.curvature_bound());
        self.ensemble.max_omega().max(spring)
    }
}

/// Arbitrary `R¹₀₁₀(τ)` with a caller-declared frequency ceiling.
#[derive(Debug, Clone, Copy)]
pub struct FnCurvature<F> {
    pub r1010: F,
    pub max_frequency: f64,
}

impl<F: Fn(f64) -> f64> CurvatureSource for FnCurvature<F> {
    fn r1010(&self, tau: f64) -> f64 {
        (self.r1010)(tau)
    }

    fn max_frequency(&self, _c: f64) -> f64 {
        self.max_frequency
    }
}

/// Largest admissible step for frequency `omega`.
pub fn step_limit(omega: f64) -> f64 {
    TAU / omega / STEPS_PER_PERIOD
}

/// Fixed-step classical Runge–Kutta integration of
/// `ℓ̈ = −c² R¹₀₁₀(τ) ℓ` from `state0.tau` to `state0.tau + tau_end`.
///
/// The step actually used is `tau_end / ceil(tau_end / dt)`, never larger
/// than `dt`, so the final sample lands exactly on the end time. Steps that
/// resolve the fastest frequency with fewer than twenty points are refused.
pub fn integrate_deviation<S: CurvatureSource + ?Sized>(
    state0: DeviationState,
    source: &S,
    c: f64,
    tau_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(tau_end.is_finite() && tau_end > 0.0) {
        return Err(param("tau_end", "must be finite and positive"));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(param("dt", "must be finite and positive"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(param("c", "must be finite and positive"));
    }
    if !state0.is_finite() {
        return Err(Error::NonFinite("initial deviation state"));
    }
    let omega_max = source.max_frequency(c);
    if !omega_max.is_finite() {
        return Err(Error::NonFinite("curvature source frequency"));
    }
    if omega_max > 0.0 && dt > step_limit(omega_max) {
        return Err(Error::StepSize {
            dt,
            omega: omega_max,
            limit: step_limit(omega_max),
        });
    }

    let raw = tau_end / dt;
    let n_steps = libm::ceil(raw * (1.0 - 1e-12)).max(1.0);
    if n_steps > (usize::MAX / 2) as f64 {
        return Err(param("dt", "too many steps"));
    }
    let n_steps = n_steps as usize;
    let h = tau_end / n_steps as f64;
    let c2 = c * c;
    let accel = |tau: f64, ell: &[f64; 3]| {
        let k = -c2 * source.r1010(tau);
        [k * ell[0], k * ell[1], k * ell[2]]
    };

    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push(state0);
    let (mut x, mut v) = (state0.ell, state0.ell_dot);
    for step in 0..n_steps {
        let tau = state0.tau + step as f64 * h;
        let k1x = v;
        let k1v = accel(tau, &x);
        let x2 = axpy(&x, 0.5 * h, &k1x);
        let v2 = axpy(&v, 0.5 * h, &k1v);
        let k2x = v2;
        let k2v = accel(tau + 0.5 * h, &x2);
        let x3 = axpy(&x, 0.5 * h, &k2x);
        let v3 = axpy(&v, 0.5 * h, &k2v);
        let k3x = v3;
        let k3v = accel(tau + 0.5 * h, &x3);
        let x4 = axpy(&x, h, &k3x);
        let v4 = axpy(&v, h, &k3v);
        let k4x = v4;
        let k4v = accel(tau + h, &x4);
        for i in 0..3 {
            x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        let next = DeviationState {
            ell: x,
            ell_dot: v,
            tau: state0.tau + (step + 1) as f64 * h,
        };
        if !next.is_finite() {
            return Err(Error::NonFinite("deviation integration"));
        }
        samples.push(next);
    }
    Ok(Trajectory {
        samples,
        dt: h,
        mode_ref: None,
    })
}

fn axpy(x: &[f64; 3], a: f64, y: &[f64; 3]) -> [f64; 3] {
    [x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]]
}

/// Real oscillatory solution `ℓ₀ cos(ωt)` for a pair released at rest.
pub fn closed_form_deviation(ell0: f64, omega: f64, t: f64) -> f64 {
    ell0 * math::cos(omega * t)
}

/// Unwrapped phase `Φ = ω t`.
pub fn accumulated_phase(omega: f64, t: f64) -> f64 {
    omega * t
}

/// Phase accumulated by one background mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRecord {
    pub mode_index: usize,
    pub omega: f64,
    pub phi: f64,
}

impl PhaseRecord {
    pub fn new(mode_index: usize, omega: f64, t: f64) -> Self {
        PhaseRecord {
            mode_index,
            omega,
            phi: accumulated_phase(omega, t),
        }
    }
}

/// `Φ(j) = ω_j t` for every mode of the ensemble.
pub fn phase_records(ensemble: &BackgroundEnsemble, t: f64) -> Vec<PhaseRecord> {
    ensemble
        .modes()
        .iter()
        .enumerate()
        .map(|(j, m)| PhaseRecord::new(j, m.omega(), t))
        .collect()
}

/// Pearson correlation of `cos Φ_A(j)` against `cos Φ_B(j)` over a shared
/// mode list.
pub fn phase_correlation(a: &[PhaseRecord], b: &[PhaseRecord]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Input("phase lists differ in length"));
    }
    if a.iter().zip(b).any(|(p, q)| p.mode_index != q.mode_index) {
        return Err(Error::Input("phase lists refer to different modes"));
    }
    if a.len() < 2 {
        return Err(Error::UndefinedCorrelation);
    }
    let n = a.len() as f64;
    let ca: Vec<f64> = a.iter().map(|r| math::cos(r.phi)).collect();
    let cb: Vec<f64> = b.iter().map(|r| math::cos(r.phi)).collect();
    let ma = ca.iter().sum::<f64>() / n;
    let mb = cb.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ca.iter().zip(&cb) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sab / math::sqrt(saa * sbb)).clamp(-1.0, 1.0))
}
