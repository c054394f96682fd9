//! Metric-weighted polarization correlator and the half-CHSH observable.
//!
//! A random unit spatial vector `λ` is projected onto two polarizer
//! directions `A`, `B` through the spatial metric `γ_ij = δ_ij − h_ij`. The
//! correlator is the average of `3 (λ·γA)(λ·γB)`; the factor 3 undoes
//! `E[λ_i λ_j] = δ_ij / 3` so that in flat space it equals `cos θ`, the
//! signed cosine of the angle between the polarizers.
//!
//! The observable combines four such correlators,
//!
//! ```text
//! S = ½ |M(a, b) + M(a', b) + M(a, b') − M(a', b')|
//! ```
//!
//! which is bounded by `√2` when `M(a, b) = cos(b − a)`.

use alloc::vec::Vec;
use core::f64::consts::{SQRT_2, TAU};

use rand::Rng;
use rand_distr::{Distribution, UnitSphere};

use crate::background::BackgroundEnsemble;
use crate::error::{param, Result};
use crate::math;
use crate::rng::{self, Domain};
use crate::tensor::FourVector;

/// Upper bound of the observable.
pub const BELL_BOUND: f64 = SQRT_2;

/// Slack allowed by [`check_bound`].
pub const BOUND_SLACK: f64 = 1e-9;

/// Fewest Monte Carlo trials accepted.
pub const MIN_TRIALS: usize = 100;

/// Trials per reduction chunk. Partial sums are formed sequentially inside a
/// chunk and merged across chunks by a fixed pairwise tree.
pub const CHUNK_TRIALS: usize = 1024;

/// Polarizer orientation in the fixed transverse (x, y) plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizerSetting {
    pub angle: f64,
}

impl PolarizerSetting {
    pub fn new(angle: f64) -> Self {
        PolarizerSetting { angle }
    }

    pub fn vector(&self) -> [f64; 3] {
        [math::cos(self.angle), math::sin(self.angle), 0.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellSettings {
    pub a: PolarizerSetting,
    pub a_prime: PolarizerSetting,
    pub b: PolarizerSetting,
    pub b_prime: PolarizerSetting,
}

impl BellSettings {
    pub fn from_angles([a, a_prime, b, b_prime]: [f64; 4]) -> Self {
        BellSettings {
            a: PolarizerSetting::new(a),
            a_prime: PolarizerSetting::new(a_prime),
            b: PolarizerSetting::new(b),
            b_prime: PolarizerSetting::new(b_prime),
        }
    }

    /// `(a, a', b, b')`.
    pub fn angles(&self) -> [f64; 4] {
        [
            self.a.angle,
            self.a_prime.angle,
            self.b.angle,
            self.b_prime.angle,
        ]
    }

    /// The settings at which the observable reaches `√2` for `M = cos`.
    pub fn maximal() -> Self {
        use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        BellSettings::from_angles([0.0, -FRAC_PI_2, -FRAC_PI_4, FRAC_PI_4])
    }
}

/// `|cos θ|`, the magnitude of the correlation factor.
pub fn correlation_analytic(theta: f64) -> f64 {
    math::cos(theta).abs()
}

/// Signed flat-space correlator `M(a, b) = cos(b − a)`.
pub fn cos_correlator(a: f64, b: f64) -> f64 {
    math::cos(b - a)
}

/// The four correlators and the observable built from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellTerms {
    pub ab: f64,
    pub a_prime_b: f64,
    pub a_b_prime: f64,
    pub a_prime_b_prime: f64,
    pub s: f64,
}

/// Evaluates `correlator(x, y)` at the four setting pairs.
pub fn bell_terms(
    settings: &BellSettings,
    mut correlator: impl FnMut(f64, f64) -> f64,
) -> BellTerms {
    let [a, ap, b, bp] = settings.angles();
    let ab = correlator(a, b);
    let a_prime_b = correlator(ap, b);
    let a_b_prime = correlator(a, bp);
    let a_prime_b_prime = correlator(ap, bp);
    BellTerms {
        ab,
        a_prime_b,
        a_b_prime,
        a_prime_b_prime,
        s: (0.5 * (ab + a_prime_b + a_b_prime - a_prime_b_prime)).abs(),
    }
}

pub fn bell_observable(settings: &BellSettings, correlator: impl FnMut(f64, f64) -> f64) -> f64 {
    bell_terms(settings, correlator).s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub within_bound: bool,
    /// `√2 − value`.
    pub margin: f64,
}

pub fn check_bound(value: f64) -> BoundCheck {
    BoundCheck {
        within_bound: value <= BELL_BOUND + BOUND_SLACK,
        margin: BELL_BOUND - value,
    }
}

/// Spacetime region from which Monte Carlo evaluation points are drawn:
/// `t ∈ [0, duration)`, each spatial coordinate in `[0, extent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingBox {
    pub duration: f64,
    pub extent: f64,
}

impl Default for SamplingBox {
    fn default() -> Self {
        SamplingBox {
            duration: TAU,
            extent: TAU,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√n_samples`.
    pub stderr: f64,
    pub n_samples: usize,
    /// Mean of `3 (λ·γA)²`; one in flat space.
    pub metric_factor_mean: f64,
}

/// Running moments of a batch of trials, mergeable in any fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Partial {
    pub n: usize,
    pub mean: f64,
    pub m2: f64,
    pub factor_sum: f64,
}

impl Partial {
    fn push(&mut self, value: f64, factor: f64) {
        self.n += 1;
        let delta = value - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (value - self.mean);
        self.factor_sum += factor;
    }

    /// Chan et al. pairwise merge of two batches.
    pub fn merge(&self, other: &Partial) -> Partial {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let (na, nb, nt) = (self.n as f64, other.n as f64, n as f64);
        Partial {
            n,
            mean: self.mean + delta * nb / nt,
            m2: self.m2 + other.m2 + delta * delta * na * nb / nt,
            factor_sum: self.factor_sum + other.factor_sum,
        }
    }
}

/// Merges chunk partials with a balanced tree in index order.
pub fn reduce_partials(partials: &[Partial]) -> Partial {
    match partials.len() {
        0 => Partial::default(),
        1 => partials[0],
        len => {
            let (left, right) = partials.split_at(len / 2);
            reduce_partials(left).merge(&reduce_partials(right))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct PreparedMode {
    spatial_e: [[f64; 3]; 3],
    k_lower: [f64; 4],
    phase0: f64,
}

/// A fully specified correlator estimate, split into independently
/// computable chunks.
#[derive(Debug, Clone)]
pub struct CorrelationProblem {
    modes: Vec<PreparedMode>,
    a: [f64; 3],
    b: [f64; 3],
    n_trials: usize,
    seed: u64,
    sampling_box: SamplingBox,
}

impl CorrelationProblem {
    pub fn new(
        ensemble: &BackgroundEnsemble,
        a: PolarizerSetting,
        b: PolarizerSetting,
        n_trials: usize,
        seed: u64,
        sampling_box: SamplingBox,
    ) -> Result<Self> {
        if n_trials < MIN_TRIALS {
            return Err(param("n_trials", "must be at least 100"));
        }
        if !(sampling_box.duration.is_finite()
            && sampling_box.duration >= 0.0
            && sampling_box.extent.is_finite()
            && sampling_box.extent >= 0.0)
        {
            return Err(param(
                "sampling_box",
                "extents must be finite and non-negative",
            ));
        }
        let modes = ensemble
            .modes()
            .iter()
            .map(|m| {
                let e = m.polarization();
                let mut spatial_e = [[0.0; 3]; 3];
                for (i, row) in spatial_e.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = e.get(i + 1, j + 1);
                    }
                }
                PreparedMode {
                    spatial_e,
                    k_lower: m.wave_vector().lower(),
                    phase0: m.phase0(),
                }
            })
            .collect();
        Ok(CorrelationProblem {
            modes,
            a: a.vector(),
            b: b.vector(),
            n_trials,
            seed,
            sampling_box,
        })
    }

    pub fn n_trials(&self) -> usize {
        self.n_trials
    }

    pub fn n_chunks(&self) -> usize {
        self.n_trials.div_ceil(CHUNK_TRIALS)
    }

    /// Returns `(3 (λ·γA)(λ·γB), 3 (λ·γA)²)` for trial `index`.
    pub fn trial(&self, index: usize) -> (f64, f64) {
        let mut rng = rng::stream(self.seed, Domain::Trial, index as u64);
        let lambda: [f64; 3] = UnitSphere.sample(&mut rng);
        let mut u = [0.0; 4];
        for v in u.iter_mut() {
            *v = rng.random();
        }
        let x = FourVector([
            u[0] * self.sampling_box.duration,
            u[1] * self.sampling_box.extent,
            u[2] * self.sampling_box.extent,
            u[3] * self.sampling_box.extent,
        ]);

        let mut gamma = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for mode in &self.modes {
            let phase: f64 = mode
                .k_lower
                .iter()
                .zip(x.0)
                .map(|(k, c)| k * c)
                .sum::<f64>()
                + mode.phase0;
            let weight = 2.0 * math::cos(phase);
            for (g_row, e_row) in gamma.iter_mut().zip(&mode.spatial_e) {
                for (g, e) in g_row.iter_mut().zip(e_row) {
                    *g -= weight * e;
                }
            }
        }
        let project = |v: &[f64; 3]| -> f64 {
            (0..3)
                .map(|i| lambda[i] * (0..3).map(|j| gamma[i][j] * v[j]).sum::<f64>())
                .sum()
        };
        let (pa, pb) = (project(&self.a), project(&self.b));
        (3.0 * pa * pb, 3.0 * pa * pa)
    }

    /// Sequential moments of chunk `chunk`.
    pub fn chunk(&self, chunk: usize) -> Partial {
        let start = chunk * CHUNK_TRIALS;
        let end = (start + CHUNK_TRIALS).min(self.n_trials);
        let mut p = Partial::default();
        for index in start..end {
            let (value, factor) = self.trial(index);
            p.push(value, factor);
        }
        p
    }

    pub fn finish(&self, total: &Partial) -> CorrelationEstimate {
        let n = total.n as f64;
        let variance = if total.n > 1 {
            total.m2 / (n - 1.0)
        } else {
            0.0
        };
        CorrelationEstimate {
            mean: total.mean,
            stderr: math::sqrt(variance / n),
            n_samples: total.n,
            metric_factor_mean: total.factor_sum / n,
        }
    }

    /// Single-threaded estimate; bit-identical to any parallel evaluation
    /// that reduces the same chunks with [`reduce_partials`].
    pub fn estimate(&self) -> CorrelationEstimate {
        let partials: Vec<Partial> = (0..self.n_chunks()).map(|c| self.chunk(c)).collect();
        self.finish(&reduce_partials(&partials))
    }
}

/// Monte Carlo estimate of the signed correlator `cos θ · ⟨g⟩` over the
/// default sampling box.
pub fn correlation_mc(
    ensemble: &BackgroundEnsemble,
    a: PolarizerSetting,
    b: PolarizerSetting,
    n_trials: usize,
    seed: u64,
) -> Result<CorrelationEstimate> {
    Ok(CorrelationProblem::new(ensemble, a, b, n_trials, seed, SamplingBox::default())?.estimate())
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Maximizes `f` on `[lo, hi]` by golden-section search.
fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-13 * (1.0 + lo.abs()) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Global maximum of the observable over the four angles.
///
/// A coarse grid of `coarse_steps` points per axis over `[0, 2π)⁴` is
/// followed by `refine_iters` rounds of coordinate ascent, each axis
/// maximized by golden-section search within one coarse step of the current
/// point.
pub fn maximize_observable(
    correlator: impl Fn(f64, f64) -> f64,
    coarse_steps: usize,
    refine_iters: usize,
) -> Result<(BellSettings, f64)> {
    if coarse_steps < 8 {
        return Err(param("coarse_steps", "must be at least 8"));
    }
    if refine_iters < 10 {
        return Err(param("refine_iters", "must be at least 10"));
    }
    let objective =
        |angles: [f64; 4]| bell_observable(&BellSettings::from_angles(angles), &correlator);
    let step = TAU / coarse_steps as f64;
    let axis = |i: usize| i as f64 * step;

    let mut best = [0.0; 4];
    let mut best_value = f64::NEG_INFINITY;
    for i in 0..coarse_steps {
        for j in 0..coarse_steps {
            for k in 0..coarse_steps {
                for l in 0..coarse_steps {
                    let angles = [axis(i), axis(j), axis(k), axis(l)];
                    let v = objective(angles);
                    if v > best_value {
                        best_value = v;
                        best = angles;
                    }
                }
            }
        }
    }

    for _ in 0..refine_iters {
        let before = best_value;
        for d in 0..4 {
            let centre = best[d];
            let along = |t: f64| {
                let mut trial = best;
                trial[d] = t;
                objective(trial)
            };
            let (t, v) = golden_section_max(along, centre - step, centre + step);
            if v > best_value {
                best_value = v;
                best[d] = t;
            }
        }
        if best_value - before <= 0.0 {
            break;
        }
    }
    Ok((BellSettings::from_angles(best), best_value))
}
