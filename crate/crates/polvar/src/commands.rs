//! Command bodies. Each returns its artifact text and a JSON result payload
//! that depends only on the configuration and inputs.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use polvar_core::background::{
    calibrate_action, calibration_scale, gauge_residuals, sample_ensemble, total_action,
    BackgroundEnsemble, DIRECTION_TOL,
};
use polvar_core::bell::{
    bell_terms, check_bound, cos_correlator, maximize_observable, BellSettings,
    CorrelationEstimate, PolarizerSetting, SamplingBox, BELL_BOUND, BOUND_SLACK,
};
use polvar_core::deviation::{
    integrate_deviation, step_limit, ConstantCurvature, CurvatureSource, DeviationState,
    EnsembleCurvature, STEPS_PER_PERIOD,
};
use polvar_core::probability::{
    continuity_residual, hamilton_jacobi_residual, schrodinger_residual, ClassicalField, Grid,
    WaveHistory,
};
use polvar_core::Error;
use serde_json::{json, Value};

use crate::config::{Profile, RunConfig};
use crate::error::{ensure_finite, CliError, CliResult};
use crate::formats::{
    read_ensemble_json, to_json, write_ensemble_json, write_trajectory_csv, write_wavefield_csv,
    BellReport, CorrelatorTerms, ResidualReport,
};
use crate::parallel::correlation_mc_parallel;

pub struct Output {
    pub artifact: String,
    pub result: Value,
    pub warnings: Vec<String>,
    pub tolerances: BTreeMap<String, f64>,
    /// Extra files requested by the configuration.
    pub side_files: Vec<(PathBuf, String)>,
}

impl Output {
    fn new(artifact: String, result: Value) -> Self {
        Output {
            artifact,
            result,
            warnings: Vec::new(),
            tolerances: BTreeMap::new(),
            side_files: Vec::new(),
        }
    }

    fn tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }
}

pub fn run(command: &str, cfg: &RunConfig, ensemble_text: Option<&str>) -> CliResult<Output> {
    let ensemble = ensemble_text.map(read_ensemble_json).transpose()?;
    match command {
        "background" => background(cfg),
        "calibrate" => calibrate(cfg, ensemble),
        "deviation" => deviation(cfg, ensemble.as_ref()),
        "bell" => bell(cfg, ensemble.as_ref()),
        "schrodinger" => schrodinger(cfg),
        _ => Err(CliError::invalid(format!("unknown command `{command}`"))),
    }
}

fn check_ensemble(ens: &BackgroundEnsemble) -> CliResult<()> {
    ensure_finite(
        "ensemble amplitudes",
        ens.modes()
            .iter()
            .flat_map(|m| [m.amp_plus(), m.amp_cross()])
            .collect::<Vec<_>>()
            .iter(),
    )
}

fn ensemble_summary(ens: &BackgroundEnsemble) -> Value {
    let (mut harmonic, mut field, mut tt) = (0.0f64, 0.0f64, 0.0f64);
    for m in ens.modes() {
        let r = gauge_residuals(m);
        harmonic = harmonic.max(r.harmonic);
        field = field.max(r.field_equation);
        tt = tt.max(m.tt_residual());
    }
    json!({
        "n_modes": ens.modes().len(),
        "max_gauge_residual": harmonic.max(field),
        "max_harmonic_residual": harmonic,
        "max_field_equation_residual": field,
        "max_tt_residual": tt,
        "total_action": total_action(ens),
        "peak_strain": ens.peak_strain(),
    })
}

fn background(cfg: &RunConfig) -> CliResult<Output> {
    let mut ens = sample_ensemble(&cfg.ensemble_spec())?;
    let mut warnings = Vec::new();
    let mut calibrated = false;
    match cfg.calibrate.map(|t| calibrate_action(&ens, t)) {
        Some(Ok(c)) => {
            ens = c;
            calibrated = true;
        }
        Some(Err(Error::CalibrationImpossible)) | None if total_action(&ens) == 0.0 => {
            warnings.push(Error::CalibrationImpossible.to_string());
        }
        Some(Err(e)) => return Err(e.into()),
        None => {}
    }
    check_ensemble(&ens)?;
    let mut result = ensemble_summary(&ens);
    result["calibrated"] = json!(calibrated);
    let mut out = Output::new(write_ensemble_json(&ens), result)
        .tolerance("direction_tol", DIRECTION_TOL)
        .tolerance("h_max", ens.h_max());
    out.warnings = warnings;
    Ok(out)
}

fn calibrate(cfg: &RunConfig, input: Option<BackgroundEnsemble>) -> CliResult<Output> {
    let ens = match input {
        Some(e) => e,
        None => sample_ensemble(&cfg.ensemble_spec())?,
    };
    let before = total_action(&ens);
    let scale = calibration_scale(&ens, cfg.target)?;
    let cal = calibrate_action(&ens, cfg.target)?;
    check_ensemble(&cal)?;
    let mut result = ensemble_summary(&cal);
    result["target"] = json!(cfg.target);
    result["scale"] = json!(scale);
    result["total_action_before"] = json!(before);
    Ok(Output::new(write_ensemble_json(&cal), result)
        .tolerance("direction_tol", DIRECTION_TOL)
        .tolerance("h_max", cal.h_max()))
}

fn deviation(cfg: &RunConfig, ensemble: Option<&BackgroundEnsemble>) -> CliResult<Output> {
    let state0 = DeviationState {
        ell: cfg.ell0,
        ell_dot: cfg.ell_dot0,
        tau: 0.0,
    };
    let (source, traj): (&str, _) = match ensemble {
        Some(ens) => {
            let src = EnsembleCurvature {
                ensemble: ens,
                position: cfg.position,
            };
            ("ensemble", run_deviation(state0, &src, cfg)?)
        }
        None => (
            "constant",
            run_deviation(state0, &ConstantCurvature(cfg.r1010), cfg)?,
        ),
    };
    let (traj, omega_max) = traj;
    let last = traj.last();
    ensure_finite("trajectory", last.ell.iter().chain(&last.ell_dot))?;
    let result = json!({
        "source": source,
        "n_samples": traj.samples.len(),
        "dt_used": traj.dt,
        "omega_max": omega_max,
        "final": { "tau": last.tau, "ell": last.ell, "ell_dot": last.ell_dot },
    });
    let mut out = Output::new(write_trajectory_csv(&traj), result)
        .tolerance("steps_per_period", STEPS_PER_PERIOD);
    if omega_max > 0.0 {
        out = out.tolerance("dt_limit", step_limit(omega_max));
    }
    Ok(out)
}

fn run_deviation<S: CurvatureSource>(
    state0: DeviationState,
    source: &S,
    cfg: &RunConfig,
) -> CliResult<(polvar_core::deviation::Trajectory, f64)> {
    let traj = integrate_deviation(state0, source, cfg.c, cfg.tau_end, cfg.dt)?;
    Ok((traj, source.max_frequency(cfg.c)))
}

fn bell(cfg: &RunConfig, ensemble: Option<&BackgroundEnsemble>) -> CliResult<Output> {
    let mut settings = BellSettings::from_angles(cfg.angles);
    if cfg.scan {
        settings = maximize_observable(cos_correlator, cfg.coarse_steps, cfg.refine_iters)?.0;
    }
    let analytic = cfg.analytic || cfg.scan;
    let [a, ap, b, bp] = settings.angles();
    let pairs = [(a, b), (ap, b), (a, bp), (ap, bp)];

    let (terms, stderr, metric_factor_mean, n_trials) = if analytic {
        let t = bell_terms(&settings, cos_correlator);
        (t, None, 1.0, 0)
    } else {
        let flat = BackgroundEnsemble::flat();
        let ens = ensemble.unwrap_or(&flat);
        let sampling_box = SamplingBox {
            duration: cfg.sampling_duration,
            extent: cfg.sampling_extent,
        };
        // identical angle pairs share the seed, so their estimates coincide
        let mut cache: Vec<((u64, u64), CorrelationEstimate)> = Vec::new();
        for &(x, y) in &pairs {
            let key = (x.to_bits(), y.to_bits());
            if !cache.iter().any(|(k, _)| *k == key) {
                let est = correlation_mc_parallel(
                    ens,
                    PolarizerSetting::new(x),
                    PolarizerSetting::new(y),
                    cfg.trials,
                    cfg.seed,
                    sampling_box,
                )?;
                cache.push((key, est));
            }
        }
        let lookup = |x: f64, y: f64| -> CorrelationEstimate {
            cache
                .iter()
                .find(|(k, _)| *k == (x.to_bits(), y.to_bits()))
                .unwrap()
                .1
        };
        let t = bell_terms(&settings, |x, y| lookup(x, y).mean);
        let errs = pairs.map(|(x, y)| lookup(x, y).stderr);
        let factor = pairs
            .iter()
            .map(|&(x, y)| lookup(x, y).metric_factor_mean)
            .sum::<f64>()
            / 4.0;
        let stderr = CorrelatorTerms {
            ab: errs[0],
            a_prime_b: errs[1],
            a_b_prime: errs[2],
            a_prime_b_prime: errs[3],
        };
        (t, Some(stderr), factor, cfg.trials)
    };

    let m = CorrelatorTerms {
        ab: terms.ab,
        a_prime_b: terms.a_prime_b,
        a_b_prime: terms.a_b_prime,
        a_prime_b_prime: terms.a_prime_b_prime,
    };
    ensure_finite(
        "correlators",
        m.values().iter().chain([&terms.s, &metric_factor_mean]),
    )?;
    let report = BellReport {
        angles: settings.angles(),
        m,
        s: terms.s,
        bound: BELL_BOUND,
        within_bound: check_bound(terms.s).within_bound,
        n_trials,
        seed: cfg.seed,
        metric_factor_mean,
        correlator: if analytic { "analytic" } else { "monte_carlo" }.to_string(),
        stderr,
        scanned: cfg.scan,
    };
    let result = serde_json::to_value(&report).expect("report serializes");
    Ok(Output::new(to_json(&report), result).tolerance("bound_slack", BOUND_SLACK))
}

fn schrodinger(cfg: &RunConfig) -> CliResult<Output> {
    let grid = Grid::new(cfg.x_min, cfg.x_max, cfg.grid_n)?;
    let dt = cfg.time_step.unwrap_or(grid.dx() * grid.dx());
    let divisor = cfg.variant.divisor().value(cfg.s0);
    let p = match cfg.profile {
        Profile::PlaneWave => cfg.momentum,
        Profile::Constant => 0.0,
    };
    let energy = p * p / (2.0 * cfg.mass);
    let action = |x: f64, t: f64| p * x - energy * t;

    let history = WaveHistory::sample(grid, 0.0, dt, divisor, |x, t| {
        let theta = action(x, t) / divisor;
        Complex64::new(theta.cos(), theta.sin())
    });
    let potential = vec![0.0; grid.len()];
    let residual = schrodinger_residual(&history, &potential, cfg.mass, cfg.s0)?;
    let classical = ClassicalField::sample(grid, cfg.mass, 0.0, dt, action, |_, _| 1.0, |_| 0.0);
    let hj = hamilton_jacobi_residual(&classical)?;
    let cont = continuity_residual(&classical)?;
    ensure_finite("residuals", [residual, hj, cont].iter())?;

    let report = ResidualReport {
        residual_max: residual,
        grid_n: cfg.grid_n,
        dt,
        variant: cfg.variant.divisor().label().to_string(),
        profile: cfg.profile.name().to_string(),
        hamilton_jacobi_residual: hj,
        continuity_residual: cont,
        energy,
    };
    let result = serde_json::to_value(&report).expect("report serializes");
    let mut out = Output::new(to_json(&report), result)
        .tolerance("dx", grid.dx())
        .tolerance("dt", dt);
    if let Some(path) = &cfg.wavefield_out {
        out.side_files
            .push((path.clone(), write_wavefield_csv(&history.current())));
    }
    Ok(out)
}
