//! On-disk formats: mode-ensemble JSON, trajectory and wavefield CSV, and
//! the residual and Bell report documents.

use std::fmt::Write as _;

use polvar_core::background::{BackgroundEnsemble, GwMode};
use polvar_core::deviation::Trajectory;
use polvar_core::probability::WaveField;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeRecord {
    pub direction: [f64; 3],
    pub omega: f64,
    pub amp_plus: f64,
    pub amp_cross: f64,
    pub phase0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub sigma: f64,
    pub seed: u64,
    pub h_max: f64,
    pub modes: Vec<ModeRecord>,
}

impl EnsembleFile {
    pub fn from_ensemble(ens: &BackgroundEnsemble) -> Self {
        EnsembleFile {
            sigma: ens.sigma(),
            seed: ens.seed(),
            h_max: ens.h_max(),
            modes: ens
                .modes()
                .iter()
                .map(|m| ModeRecord {
                    direction: m.direction(),
                    omega: m.omega(),
                    amp_plus: m.amp_plus(),
                    amp_cross: m.amp_cross(),
                    phase0: m.phase0(),
                })
                .collect(),
        }
    }

    /// Validates every mode and the strain budget.
    pub fn to_ensemble(&self) -> CliResult<BackgroundEnsemble> {
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, r)| {
                GwMode::new(r.direction, r.omega, r.amp_plus, r.amp_cross, r.phase0)
                    .map_err(|e| CliError::invalid(format!("mode {i}: {e}")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(BackgroundEnsemble::new(
            modes, self.sigma, self.seed, self.h_max,
        )?)
    }
}

pub fn write_ensemble_json(ens: &BackgroundEnsemble) -> String {
    let mut s = serde_json::to_string_pretty(&EnsembleFile::from_ensemble(ens))
        .expect("ensemble serializes");
    s.push('\n');
    s
}

pub fn read_ensemble_json(text: &str) -> CliResult<BackgroundEnsemble> {
    let file: EnsembleFile =
        serde_json::from_str(text).map_err(|e| CliError::invalid(format!("ensemble file: {e}")))?;
    file.to_ensemble()
}

pub const TRAJECTORY_HEADER: &str = "tau,ell_x,ell_y,ell_z,elldot_x,elldot_y,elldot_z";

/// One row per sample, 17 significant digits.
pub fn write_trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(64 + traj.samples.len() * 170);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in &traj.samples {
        let row = [
            s.tau,
            s.ell[0],
            s.ell[1],
            s.ell[2],
            s.ell_dot[0],
            s.ell_dot[1],
            s.ell_dot[2],
        ];
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses a trajectory CSV back into rows of seven values.
pub fn read_trajectory_csv(text: &str) -> CliResult<Vec<[f64; 7]>> {
    let mut lines = text.lines();
    if lines.next() != Some(TRAJECTORY_HEADER) {
        return Err(CliError::invalid("trajectory CSV: unexpected header"));
    }
    lines
        .map(|line| {
            let mut row = [0.0; 7];
            let mut fields = line.split(',');
            for v in row.iter_mut() {
                *v = fields.next().and_then(|f| f.parse().ok()).ok_or_else(|| {
                    CliError::invalid(format!("trajectory CSV: bad row `{line}`"))
                })?;
            }
            Ok(row)
        })
        .collect()
}

pub const WAVEFIELD_HEADER: &str = "x,re_psi,im_psi";

pub fn write_wavefield_csv(field: &WaveField) -> String {
    let mut out = String::from(WAVEFIELD_HEADER);
    out.push('\n');
    for (i, z) in field.psi.iter().enumerate() {
        writeln!(out, "{},{},{}", field.grid.x(i), z.re, z.im).unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub residual_max: f64,
    pub grid_n: usize,
    pub dt: f64,
    pub variant: String,
    pub profile: String,
    pub hamilton_jacobi_residual: f64,
    pub continuity_residual: f64,
    pub energy: f64,
}

/// The four correlators in report order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorTerms {
    #[serde(rename = "AB")]
    pub ab: f64,
    #[serde(rename = "A'B")]
    pub a_prime_b: f64,
    #[serde(rename = "AB'")]
    pub a_b_prime: f64,
    #[serde(rename = "A'B'")]
    pub a_prime_b_prime: f64,
}

impl CorrelatorTerms {
    pub fn values(&self) -> [f64; 4] {
        [
            self.ab,
            self.a_prime_b,
            self.a_b_prime,
            self.a_prime_b_prime,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellReport {
    pub angles: [f64; 4],
    #[serde(rename = "M")]
    pub m: CorrelatorTerms,
    #[serde(rename = "S")]
    pub s: f64,
    pub bound: f64,
    pub within_bound: bool,
    pub n_trials: usize,
    pub seed: u64,
    pub metric_factor_mean: f64,
    /// `"analytic"` or `"monte_carlo"`.
    pub correlator: String,
    /// Monte Carlo standard errors of the four correlators.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stderr: Option<CorrelatorTerms>,
    /// Set when the angles came from a global search.
    #[serde(default)]
    pub scanned: bool,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use polvar_core::background::{sample_ensemble, EnsembleSpec};
    use polvar_core::deviation::DeviationState;

    #[test]
    fn ensemble_round_trips_bit_exactly() {
        let ens = sample_ensemble(&EnsembleSpec {
            n_modes: 50,
            sigma: 3e-5,
            omega_min: 0.1,
            omega_max: 1e3,
            h_max: 1e-3,
            seed: 77,
        })
        .unwrap();
        let text = write_ensemble_json(&ens);
        let back = read_ensemble_json(&text).unwrap();
        assert_eq!(back, ens);
        assert_eq!(write_ensemble_json(&back), text);
    }

    #[test]
    fn unknown_ensemble_keys_are_rejected() {
        let text = r#"{"sigma":0,"seed":0,"h_max":1e-3,"modes":[],"extra":1}"#;
        assert!(matches!(
            read_ensemble_json(text),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn trajectory_csv_keeps_seventeen_digits() {
        let traj = Trajectory {
            samples: vec![DeviationState {
                ell: [0.1, 1.0 / 3.0, -2.0],
                ell_dot: [0.0, 1e-300, 7.0],
                tau: 0.0,
            }],
            dt: 0.1,
            mode_ref: None,
        };
        let text = write_trajectory_csv(&traj);
        assert!(text.starts_with("tau,ell_x,ell_y,ell_z,elldot_x,elldot_y,elldot_z\n"));
        let rows = read_trajectory_csv(&text).unwrap();
        assert_eq!(rows[0], [0.0, 0.1, 1.0 / 3.0, -2.0, 0.0, 1e-300, 7.0]);
        assert!(text.contains("3.3333333333333331e-1"));
    }
}
