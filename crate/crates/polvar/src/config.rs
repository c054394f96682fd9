//! Run configuration: built-in defaults, overlaid by an optional JSON config
//! file, overlaid by command-line flags.

use std::f64::consts::TAU;
use std::path::PathBuf;

use polvar_core::background::{EnsembleSpec, DEFAULT_H_MAX};
use polvar_core::bell::{BellSettings, MIN_TRIALS};
use polvar_core::probability::{PhaseDivisor, MIN_GRID_POINTS};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "2S0")]
    TwoS0,
    #[serde(rename = "S0")]
    S0,
}

impl Variant {
    pub fn divisor(self) -> PhaseDivisor {
        match self {
            Variant::TwoS0 => PhaseDivisor::TwoS0,
            Variant::S0 => PhaseDivisor::S0,
        }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "2S0" => Ok(Variant::TwoS0),
            "S0" => Ok(Variant::S0),
            _ => Err(format!("unknown variant `{s}` (expected 2S0 or S0)")),
        }
    }
}

/// Test field for the wave-equation residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `exp(i(px − Et)/divisor)` with `E = p²/2m`.
    PlaneWave,
    /// `ψ ≡ 1`.
    Constant,
}

impl Profile {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "plane_wave" => Ok(Profile::PlaneWave),
            "constant" => Ok(Profile::Constant),
            _ => Err(format!(
                "unknown profile `{s}` (expected plane_wave or constant)"
            )),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::PlaneWave => "plane_wave",
            Profile::Constant => "constant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Input ensemble file; when absent an ensemble is sampled (background,
    /// calibrate), constant curvature is used (deviation) or space is flat
    /// (bell).
    pub ensemble: Option<PathBuf>,

    pub n_modes: usize,
    pub sigma: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub h_max: f64,
    /// Action target applied by `background` after sampling.
    pub calibrate: Option<f64>,
    /// Action target of the `calibrate` command.
    pub target: f64,

    pub r1010: f64,
    pub c: f64,
    pub position: [f64; 3],
    pub ell0: [f64; 3],
    pub ell_dot0: [f64; 3],
    pub tau_end: f64,
    pub dt: f64,

    pub angles: [f64; 4],
    pub trials: usize,
    pub analytic: bool,
    pub scan: bool,
    pub coarse_steps: usize,
    pub refine_iters: usize,
    pub sampling_duration: f64,
    pub sampling_extent: f64,

    pub variant: Variant,
    pub profile: Profile,
    pub grid_n: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub momentum: f64,
    pub mass: f64,
    pub s0: f64,
    /// Time step of the residual stencil; `dx²` when absent.
    pub time_step: Option<f64>,
    pub wavefield_out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out: None,
            ensemble: None,
            n_modes: 128,
            sigma: 1e-4,
            omega_min: 1e6,
            omega_max: 1e8,
            h_max: DEFAULT_H_MAX,
            calibrate: None,
            target: 1.0,
            r1010: 1.0,
            c: 1.0,
            position: [0.0; 3],
            ell0: [1.0, 0.0, 0.0],
            ell_dot0: [0.0; 3],
            tau_end: 10.0 * TAU,
            dt: 0.01,
            angles: BellSettings::maximal().angles(),
            trials: 100_000,
            analytic: false,
            scan: false,
            coarse_steps: 16,
            refine_iters: 20,
            sampling_duration: TAU,
            sampling_extent: TAU,
            variant: Variant::TwoS0,
            profile: Profile::PlaneWave,
            grid_n: 512,
            x_min: 0.0,
            x_max: 0.2,
            momentum: 1.0,
            mass: 1.0,
            s0: 0.5,
            time_step: None,
            wavefield_out: None,
        }
    }
}

fn finite(name: &str, v: f64) -> CliResult<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::invalid(format!("`{name}` must be finite")))
    }
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::invalid(format!(
            "`{name}` must be finite and positive"
        )))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::invalid(format!("config: {e}")))
    }

    pub fn ensemble_spec(&self) -> EnsembleSpec {
        EnsembleSpec {
            n_modes: self.n_modes,
            sigma: self.sigma,
            omega_min: self.omega_min,
            omega_max: self.omega_max,
            h_max: self.h_max,
            seed: self.seed,
        }
    }

    pub fn validate(&self, command: &str) -> CliResult<()> {
        match command {
            "background" | "calibrate" => {
                if self.ensemble.is_none() || command == "background" {
                    self.ensemble_spec().validate()?;
                }
                if let Some(t) = self.calibrate.filter(|_| command == "background") {
                    positive("calibrate", t)?;
                }
                if command == "calibrate" {
                    positive("target", self.target)?;
                }
            }
            "deviation" => {
                finite("r1010", self.r1010)?;
                positive("c", self.c)?;
                positive("tau_end", self.tau_end)?;
                positive("dt", self.dt)?;
                for (name, v) in [
                    ("position", self.position),
                    ("ell0", self.ell0),
                    ("ell_dot0", self.ell_dot0),
                ] {
                    v.iter().try_for_each(|&x| finite(name, x))?;
                }
            }
            "bell" => {
                self.angles.iter().try_for_each(|&a| finite("angles", a))?;
                if !self.analytic && self.trials < MIN_TRIALS {
                    return Err(CliError::invalid(format!(
                        "`trials` must be at least {MIN_TRIALS}"
                    )));
                }
                if self.scan && self.coarse_steps < 8 {
                    return Err(CliError::invalid("`coarse_steps` must be at least 8"));
                }
                if self.scan && self.refine_iters < 10 {
                    return Err(CliError::invalid("`refine_iters` must be at least 10"));
                }
                for (name, v) in [
                    ("sampling_duration", self.sampling_duration),
                    ("sampling_extent", self.sampling_extent),
                ] {
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(CliError::invalid(format!(
                            "`{name}` must be finite and non-negative"
                        )));
                    }
                }
            }
            "schrodinger" => {
                if self.grid_n < MIN_GRID_POINTS {
                    return Err(CliError::invalid(format!(
                        "`grid_n` must be at least {MIN_GRID_POINTS}"
                    )));
                }
                finite("x_min", self.x_min)?;
                finite("x_max", self.x_max)?;
                if self.x_max <= self.x_min {
                    return Err(CliError::invalid("`x_max` must exceed `x_min`"));
                }
                finite("momentum", self.momentum)?;
                positive("mass", self.mass)?;
                positive("s0", self.s0)?;
                if let Some(dt) = self.time_step {
                    positive("time_step", dt)?;
                }
            }
            _ => return Err(CliError::invalid(format!("unknown command `{command}`"))),
        }
        Ok(())
    }
}
