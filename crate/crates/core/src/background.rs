//! Stochastic ensembles of weak gravitational plane waves.
//!
//! Each [`GwMode`] is a transverse-traceless plane wave travelling along a
//! unit direction `n` with wave vector `k^μ = (ω, ω n)`. The real metric
//! perturbation it contributes is
//!
//! ```text
//! h_μν(x) = 2 e_μν cos(k_γ x^γ + φ0)
//! ```
//!
//! i.e. `e exp(i k·x) + c.c.`, where `e` is built from the plus and cross
//! amplitudes in the plane orthogonal to `n`. A [`BackgroundEnsemble`] is a
//! seeded superposition of such modes with isotropic directions,
//! log-uniform frequencies, Gaussian amplitudes and uniform phases.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};

use crate::error::{param, Error, Result};
use crate::math;
use crate::rng::{self, Domain};
use crate::tensor::{FourVector, SymTensor2, ETA};

/// Default linearization budget on `|amp_plus| + |amp_cross|` per mode.
pub const DEFAULT_H_MAX: f64 = 1e-3;

/// Tolerance on `|n| = 1` for mode directions.
pub const DIRECTION_TOL: f64 = 1e-12;

/// One plane-wave metric perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GwMode {
    direction: [f64; 3],
    omega: f64,
    amp_plus: f64,
    amp_cross: f64,
    phase0: f64,
}

impl GwMode {
    pub fn new(
        direction: [f64; 3],
        omega: f64,
        amp_plus: f64,
        amp_cross: f64,
        phase0: f64,
    ) -> Result<Self> {
        if !direction.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("mode direction"));
        }
        let norm = math::sqrt(dot3(&direction, &direction));
        if (norm - 1.0).abs() > DIRECTION_TOL {
            return Err(param("direction", "must have unit Euclidean norm"));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(param("omega", "must be finite and positive"));
        }
        if !(amp_plus.is_finite() && amp_cross.is_finite()) {
            return Err(Error::NonFinite("mode amplitude"));
        }
        if !(0.0..TAU).contains(&phase0) {
            return Err(param("phase0", "must lie in [0, 2π)"));
        }
        Ok(GwMode {
            direction,
            omega,
            amp_plus,
            amp_cross,
            phase0,
        })
    }

    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn amp_plus(&self) -> f64 {
        self.amp_plus
    }

    pub fn amp_cross(&self) -> f64 {
        self.amp_cross
    }

    pub fn phase0(&self) -> f64 {
        self.phase0
    }

    /// `|amp_plus| + |amp_cross|`, the quantity bounded by `h_max`.
    pub fn strain_budget(&self) -> f64 {
        self.amp_plus.abs() + self.amp_cross.abs()
    }

    /// Copy with both amplitudes multiplied by `s`.
    pub fn with_amplitude_scale(&self, s: f64) -> GwMode {
        GwMode {
            amp_plus: self.amp_plus * s,
            amp_cross: self.amp_cross * s,
            ..*self
        }
    }

    /// Contravariant wave vector `(ω, ω n)`.
    pub fn wave_vector(&self) -> FourVector {
        let [x, y, z] = self.direction;
        let w = self.omega;
        FourVector([w, w * x, w * y, w * z])
    }

    /// Right-handed orthonormal pair `(p, q)` spanning the plane orthogonal
    /// to the direction, with `q = n × p`.
    pub fn transverse_basis(&self) -> ([f64; 3], [f64; 3]) {
        let n = self.direction;
        let reference = if n[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let along = dot3(&reference, &n);
        let mut p = [
            reference[0] - along * n[0],
            reference[1] - along * n[1],
            reference[2] - along * n[2],
        ];
        let len = math::sqrt(dot3(&p, &p));
        p.iter_mut().for_each(|c| *c /= len);
        (p, cross3(&n, &p))
    }

    /// Polarization tensor `e_μν`, purely spatial.
    pub fn polarization(&self) -> SymTensor2 {
        let (p, q) = self.transverse_basis();
        let mut block = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                block[i][j] = self.amp_plus * (p[i] * p[j] - q[i] * q[j])
                    + self.amp_cross * (p[i] * q[j] + q[i] * p[j]);
            }
        }
        SymTensor2::spatial(block)
    }

    /// `k_γ x^γ + φ0`.
    pub fn phase_at(&self, x: &FourVector) -> f64 {
        let k = self.wave_vector();
        k.minkowski_dot(x) + self.phase0
    }

    /// This mode's contribution to `h_μν(x)`.
    pub fn perturbation_at(&self, x: &FourVector) -> SymTensor2 {
        self.polarization()
            .scaled(2.0 * math::cos(self.phase_at(x)))
    }

    /// Largest violation among `e_μν k^ν = 0`, `trace(e) = 0` and `e_0ν = 0`.
    pub fn tt_residual(&self) -> f64 {
        let e = self.polarization();
        let k = self.wave_vector();
        let ek = e.contract(&k.0);
        let transverse = ek.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let temporal = (0..4).fold(0.0_f64, |m, nu| m.max(e.get(0, nu).abs()));
        transverse.max(e.trace().abs()).max(temporal)
    }
}

/// Harmonic-gauge and vacuum-field-equation residuals of a plane wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeResiduals {
    /// `max_n |k_m e^m_n − ½ k_n e^m_m|`.
    pub harmonic: f64,
    /// `|k_γ k^γ| · max|e|`.
    pub field_equation: f64,
}

/// Residuals for an arbitrary wave vector and polarization.
///
/// For `h = 2e cos(k·x + φ)` the harmonic condition
/// `∂_m h^m_n = ½ ∂_n h^m_m` and the vacuum equation `□h = 0` reduce to the
/// algebraic checks below.
pub fn plane_wave_residuals(k: &FourVector, e: &SymTensor2) -> GaugeResiduals {
    let k_lower = k.lower();
    // k_m e^m_n = k^α e_αn
    let k_e = e.contract(&k.0);
    let trace = e.trace();
    let harmonic = (0..4)
        .map(|n| (k_e[n] - 0.5 * k_lower[n] * trace).abs())
        .fold(0.0_f64, f64::max);
    GaugeResiduals {
        harmonic,
        field_equation: k.minkowski_dot(k).abs() * e.max_abs(),
    }
}

pub fn gauge_residuals(mode: &GwMode) -> GaugeResiduals {
    plane_wave_residuals(&mode.wave_vector(), &mode.polarization())
}

/// A seeded superposition of plane-wave modes.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundEnsemble {
    modes: Vec<GwMode>,
    sigma: f64,
    seed: u64,
    h_max: f64,
}

impl BackgroundEnsemble {
    /// Assembles an ensemble, checking every mode against the budget.
    pub fn new(modes: Vec<GwMode>, sigma: f64, seed: u64, h_max: f64) -> Result<Self> {
        if !(h_max.is_finite() && h_max > 0.0) {
            return Err(param("h_max", "must be finite and positive"));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(param("sigma", "must be finite and non-negative"));
        }
        if modes.iter().any(|m| m.strain_budget() > h_max) {
            return Err(param("modes", "mode amplitude exceeds h_max"));
        }
        Ok(BackgroundEnsemble {
            modes,
            sigma,
            seed,
            h_max,
        })
    }

    /// An ensemble without modes: `h ≡ 0`.
    pub fn flat() -> Self {
        BackgroundEnsemble {
            modes: Vec::new(),
            sigma: 0.0,
            seed: 0,
            h_max: DEFAULT_H_MAX,
        }
    }

    pub fn modes(&self) -> &[GwMode] {
        &self.modes
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn max_omega(&self) -> f64 {
        self.modes.iter().map(GwMode::omega).fold(0.0, f64::max)
    }

    pub fn peak_strain(&self) -> f64 {
        self.modes
            .iter()
            .map(GwMode::strain_budget)
            .fold(0.0, f64::max)
    }

    /// Upper bound on `|R¹₀₁₀|` anywhere: `Σ ω²(|A+| + |A×|)`.
    pub fn curvature_bound(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| m.omega * m.omega * m.strain_budget())
            .sum()
    }

    fn scaled(&self, s: f64) -> BackgroundEnsemble {
        BackgroundEnsemble {
            modes: self
                .modes
                .iter()
                .map(|m| m.with_amplitude_scale(s))
                .collect(),
            ..*self
        }
    }
}

/// Parameters of the sampling distribution for [`sample_ensemble`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub n_modes: usize,
    pub sigma: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub h_max: f64,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(param("n_modes", "must be at least 1"));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(param("sigma", "must be finite and non-negative"));
        }
        if !(self.omega_min.is_finite() && self.omega_min > 0.0) {
            return Err(param("omega_min", "must be finite and positive"));
        }
        if !(self.omega_max.is_finite() && self.omega_max >= self.omega_min) {
            return Err(param("omega_max", "must be finite and >= omega_min"));
        }
        if !(self.h_max.is_finite() && self.h_max > 0.0) {
            return Err(param("h_max", "must be finite and positive"));
        }
        Ok(())
    }
}

/// Draws mode `index` from its own counter-addressed stream.
fn sample_mode(spec: &EnsembleSpec, index: usize) -> GwMode {
    let mut rng = rng::stream(spec.seed, Domain::Ensemble, index as u64);
    let direction: [f64; 3] = UnitSphere.sample(&mut rng);
    let (lo, hi) = (math::ln(spec.omega_min), math::ln(spec.omega_max));
    let u: f64 = rng.random();
    let omega = math::exp(lo + u * (hi - lo)).clamp(spec.omega_min, spec.omega_max);
    let z_plus: f64 = StandardNormal.sample(&mut rng);
    let z_cross: f64 = StandardNormal.sample(&mut rng);
    let mut phase0 = rng.random::<f64>() * TAU;
    if phase0 >= TAU {
        phase0 = 0.0;
    }
    GwMode {
        direction,
        omega,
        amp_plus: spec.sigma * z_plus,
        amp_cross: spec.sigma * z_cross,
        phase0,
    }
}

/// Samples an isotropic ensemble, deterministic in `spec.seed`.
///
/// Directions are uniform on the sphere, `ω` is log-uniform on
/// `[omega_min, omega_max]`, amplitudes are `N(0, sigma²)` and phases uniform
/// on `[0, 2π)`. If the largest `|A+| + |A×|` exceeds `h_max`, all amplitudes
/// are shrunk by one common factor.
pub fn sample_ensemble(spec: &EnsembleSpec) -> Result<BackgroundEnsemble> {
    spec.validate()?;
    let mut modes: Vec<GwMode> = (0..spec.n_modes).map(|j| sample_mode(spec, j)).collect();
    let peak = modes.iter().map(GwMode::strain_budget).fold(0.0, f64::max);
    if peak > spec.h_max {
        let mut s = spec.h_max / peak;
        loop {
            let scaled: Vec<GwMode> = modes.iter().map(|m| m.with_amplitude_scale(s)).collect();
            if scaled.iter().all(|m| m.strain_budget() <= spec.h_max) {
                modes = scaled;
                break;
            }
            s = s.next_down();
        }
    }
    BackgroundEnsemble::new(modes, spec.sigma, spec.seed, spec.h_max)
}

/// Metric perturbation `h_μν(x)`: symmetric, traceless and purely spatial.
pub fn evaluate_h(ensemble: &BackgroundEnsemble, x: &FourVector) -> SymTensor2 {
    let mut h = SymTensor2::ZERO;
    for mode in &ensemble.modes {
        h.add_scaled(&mode.polarization(), 2.0 * math::cos(mode.phase_at(x)));
    }
    h
}

/// Linearized metric `g = η + h`.
pub fn metric_at(ensemble: &BackgroundEnsemble, x: &FourVector) -> SymTensor2 {
    ETA + evaluate_h(ensemble, x)
}

/// Linearized Riemann tensor with all indices down,
///
/// `R_μνρσ = ½(∂_ν∂_ρ h_μσ + ∂_μ∂_σ h_νρ − ∂_ν∂_σ h_μρ − ∂_μ∂_ρ h_νσ)`,
///
/// using the exact plane-wave second derivatives
/// `∂_α∂_β h_μν = −k_α k_β h_μν`.
pub fn riemann_lower(ensemble: &BackgroundEnsemble, x: &FourVector, idx: [usize; 4]) -> f64 {
    let [mu, nu, rho, sigma] = idx;
    ensemble
        .modes
        .iter()
        .map(|mode| {
            let k = mode.wave_vector().lower();
            let e = mode.polarization();
            let amp = -2.0 * math::cos(mode.phase_at(x));
            let combo = k[nu] * k[rho] * e.get(mu, sigma) + k[mu] * k[sigma] * e.get(nu, rho)
                - k[nu] * k[sigma] * e.get(mu, rho)
                - k[mu] * k[rho] * e.get(nu, sigma);
            0.5 * amp * combo
        })
        .sum()
}

/// `R¹₀₁₀ = η¹¹ R_1010`, the spring term of the deviation equation.
pub fn riemann_r1010(ensemble: &BackgroundEnsemble, x: &FourVector) -> f64 {
    ETA.get(1, 1) * riemann_lower(ensemble, x, [1, 0, 1, 0])
}

/// Quadratic action proxy of one mode over a unit box and one period,
/// `S = (V T / 32πG) ω² (A+² + A×²)` with `V = G = 1`, `T = 2π/ω`.
pub fn mode_action(mode: &GwMode) -> f64 {
    let period = TAU / mode.omega;
    period / (32.0 * PI)
        * mode.omega
        * mode.omega
        * (mode.amp_plus * mode.amp_plus + mode.amp_cross * mode.amp_cross)
}

pub fn total_action(ensemble: &BackgroundEnsemble) -> f64 {
    ensemble.modes.iter().map(mode_action).sum()
}

/// Common amplitude factor that brings `Σ S_j` to `target_action`.
pub fn calibration_scale(ensemble: &BackgroundEnsemble, target_action: f64) -> Result<f64> {
    if !(target_action.is_finite() && target_action > 0.0) {
        return Err(param("target_action", "must be finite and positive"));
    }
    let current = total_action(ensemble);
    if current == 0.0 {
        return Err(Error::CalibrationImpossible);
    }
    if !current.is_finite() {
        return Err(Error::NonFinite("total action"));
    }
    Ok(math::sqrt(target_action / current))
}

/// Rescales all amplitudes so that the total action equals `target_action`.
///
/// Fails with [`Error::BudgetExceeded`] when the calibrated amplitudes would
/// break the ensemble's `h_max`.
pub fn calibrate_action(
    ensemble: &BackgroundEnsemble,
    target_action: f64,
) -> Result<BackgroundEnsemble> {
    let s = calibration_scale(ensemble, target_action)?;
    let out = ensemble.scaled(s);
    let peak = out.peak_strain();
    if peak > out.h_max {
        return Err(Error::BudgetExceeded {
            peak,
            h_max: out.h_max,
        });
    }
    Ok(out)
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn spec(n_modes: usize, sigma: f64, seed: u64) -> EnsembleSpec {
        EnsembleSpec {
            n_modes,
            sigma,
            omega_min: 0.5,
            omega_max: 5.0,
            h_max: DEFAULT_H_MAX,
            seed,
        }
    }

    fn z_plus_mode(amp_plus: f64, omega: f64) -> GwMode {
        GwMode::new([0.0, 0.0, 1.0], omega, amp_plus, 0.0, 0.0).unwrap()
    }

    #[test]
    fn zero_sigma_gives_zero_field() {
        let ens = sample_ensemble(&spec(1, 0.0, 7)).unwrap();
        assert_eq!(ens.modes().len(), 1);
        assert_eq!(ens.modes()[0].amp_plus(), 0.0);
        assert_eq!(ens.modes()[0].amp_cross(), 0.0);
        let h = evaluate_h(&ens, &FourVector([0.3, -1.0, 2.0, 0.5]));
        assert_eq!(h, SymTensor2::ZERO);
        assert_eq!(metric_at(&ens, &FourVector([0.3, -1.0, 2.0, 0.5])), ETA);
    }

    #[test]
    fn sampling_rejects_bad_parameters() {
        assert!(sample_ensemble(&spec(0, 1.0, 1)).is_err());
        assert!(sample_ensemble(&spec(3, -1.0, 1)).is_err());
        let mut s = spec(3, 1.0, 1);
        s.omega_min = 0.0;
        assert!(sample_ensemble(&s).is_err());
        let mut s = spec(3, 1.0, 1);
        s.omega_max = 0.1;
        assert!(matches!(
            sample_ensemble(&s),
            Err(Error::Parameter {
                name: "omega_max",
                ..
            })
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_capped() {
        let a = sample_ensemble(&spec(200, 1.0, 42)).unwrap();
        let b = sample_ensemble(&spec(200, 1.0, 42)).unwrap();
        assert_eq!(a, b);
        assert!(a.peak_strain() <= DEFAULT_H_MAX);
        // cap is active with sigma = 1, so the peak sits on the budget
        assert!(a.peak_strain() > 0.999_999 * DEFAULT_H_MAX);
        let c = sample_ensemble(&spec(200, 1.0, 43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mode_draws_do_not_depend_on_ensemble_size() {
        let small = sample_ensemble(&spec(5, 1e-6, 9)).unwrap();
        let large = sample_ensemble(&spec(50, 1e-6, 9)).unwrap();
        assert_eq!(small.modes(), &large.modes()[..5]);
    }

    #[test]
    fn plus_mode_along_z_at_origin() {
        let ens = BackgroundEnsemble::new(vec![z_plus_mode(1e-3, 1.0)], 0.0, 0, 1e-3).unwrap();
        let h = evaluate_h(&ens, &FourVector::ZERO);
        assert_eq!(h.get(1, 1), 2e-3);
        assert_eq!(h.get(2, 2), -2e-3);
        for (mu, nu) in [(0, 0), (0, 1), (0, 3), (1, 2), (1, 3), (2, 3), (3, 3)] {
            assert_eq!(h.get(mu, nu), 0.0, "entry ({mu},{nu})");
        }
        let g = metric_at(&ens, &FourVector::ZERO);
        assert_eq!(
            [g.get(0, 0), g.get(1, 1), g.get(2, 2), g.get(3, 3)],
            [1.0, -1.0 + 2e-3, -1.0 - 2e-3, -1.0]
        );
    }

    #[test]
    fn metric_determinant_is_second_order() {
        let ens = sample_ensemble(&spec(30, 1.0, 5)).unwrap();
        for t in 0..20 {
            let x = FourVector([t as f64 * 0.37, 0.1 * t as f64, -0.2, 1.3]);
            let h = evaluate_h(&ens, &x);
            let dg = metric_at(&ens, &x).det() - ETA.det();
            // traceless h: first-order term η^μν h_μν vanishes
            assert!(dg.abs() <= 10.0 * h.max_abs().powi(2), "dg = {dg}");
        }
    }

    #[test]
    fn field_is_periodic_along_the_wave() {
        let mode = GwMode::new([0.6, 0.0, 0.8], 2.5, 4e-4, -3e-4, 1.0).unwrap();
        let ens = BackgroundEnsemble::new(vec![mode], 0.0, 0, 1e-3).unwrap();
        let x = FourVector([0.2, 0.4, -0.7, 1.1]);
        let shifted = x + FourVector([TAU / 2.5, 0.0, 0.0, 0.0]);
        let (a, b) = (evaluate_h(&ens, &x), evaluate_h(&ens, &shifted));
        for mu in 0..4 {
            for nu in 0..4 {
                assert!((a.get(mu, nu) - b.get(mu, nu)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn injected_time_component_breaks_harmonic_gauge() {
        let mode = z_plus_mode(1e-3, 2.0);
        let mut e = mode.polarization();
        e.set(0, 0, 1e-3);
        let r = plane_wave_residuals(&mode.wave_vector(), &e);
        assert!(r.harmonic > 0.0);
        // n = 0 row: k^0 e_00 − ½ k_0 e^m_m = ω·1e-3 − ½ω·1e-3
        assert!((r.harmonic - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn non_null_wave_vector_residual() {
        let omega = 1.7;
        let mode = GwMode::new([0.0, 1.0, 0.0], omega, 6e-4, 2e-4, 0.3).unwrap();
        let mut k = mode.wave_vector();
        k.0[0] = 2.0 * omega;
        let e = mode.polarization();
        let r = plane_wave_residuals(&k, &e);
        let expected = 3.0 * omega * omega * e.max_abs();
        assert!((r.field_equation - expected).abs() <= 1e-15 * expected.max(1.0));
    }

    #[test]
    fn r1010_vanishes_without_modes() {
        assert_eq!(
            riemann_r1010(
                &BackgroundEnsemble::flat(),
                &FourVector([1.0, 2.0, 3.0, 4.0])
            ),
            0.0
        );
    }

    #[test]
    fn r1010_of_plus_mode_at_trough() {
        // cos(k·x) = −1 at t = π/ω on the z axis origin
        let (amp, omega) = (5e-4, 3.0);
        let ens = BackgroundEnsemble::new(vec![z_plus_mode(amp, omega)], 0.0, 0, 1e-3).unwrap();
        let x = FourVector([PI / omega, 0.0, 0.0, 0.0]);
        // R¹₀₁₀ = ½ ∂_t² h_11 = ½ (−ω²)(2 amp)(−1)
        let r = riemann_r1010(&ens, &x);
        assert!((r - omega * omega * amp).abs() < 1e-15);
    }

    #[test]
    fn calibration_scales_quadratically() {
        let mode = z_plus_mode(4e-4, 2.0);
        let ens = BackgroundEnsemble::new(vec![mode], 0.0, 0, 1e-3).unwrap();
        let target = mode_action(&mode) / 4.0;
        let scale = calibration_scale(&ens, target).unwrap();
        assert!((scale - 0.5).abs() < 1e-15);
        let cal = calibrate_action(&ens, target).unwrap();
        assert!((cal.modes()[0].amp_plus() - 2e-4).abs() < 1e-18);
        let again = calibration_scale(&cal, target).unwrap();
        assert!((again - 1.0).abs() < 1e-12);
    }

    #[test]
    fn calibration_of_equal_modes_splits_action() {
        let m = z_plus_mode(3e-4, 1.5);
        let ens = BackgroundEnsemble::new(vec![m, m], 0.0, 0, 1e-3).unwrap();
        let target = 1e-8;
        let cal = calibrate_action(&ens, target).unwrap();
        for mode in cal.modes() {
            assert!((mode_action(mode) - target / 2.0).abs() <= 1e-12 * target);
        }
    }

    #[test]
    fn calibration_errors() {
        let zero = sample_ensemble(&spec(3, 0.0, 1)).unwrap();
        assert_eq!(
            calibrate_action(&zero, 1.0),
            Err(Error::CalibrationImpossible)
        );
        let weak = sample_ensemble(&spec(3, 1e-5, 1)).unwrap();
        assert!(matches!(
            calibrate_action(&weak, 1.0),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn mode_validation() {
        assert!(GwMode::new([1.0, 1.0, 0.0], 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(GwMode::new([1.0, 0.0, 0.0], 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(GwMode::new([1.0, 0.0, 0.0], 1.0, 0.0, 0.0, TAU).is_err());
        assert!(GwMode::new([1.0, 0.0, 0.0], 1.0, f64::NAN, 0.0, 0.0).is_err());
        let too_big = GwMode::new([1.0, 0.0, 0.0], 1.0, 8e-4, 8e-4, 0.0).unwrap();
        assert!(BackgroundEnsemble::new(vec![too_big], 0.0, 0, 1e-3).is_err());
    }
}
