//! Argument parsing, configuration layering and process plumbing.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::commands::{self, Output};
use crate::config::{Profile, RunConfig, Variant};
use crate::error::{CliError, CliResult};
use crate::report::RunReport;

#[derive(Debug, Parser)]
#[command(
    name = "polvar",
    version,
    about = "Stochastic weak-field metric simulations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed of every random stream.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Artifact destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config whose keys are RunConfig field names.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Sampling {
    #[arg(long)]
    pub n_modes: Option<usize>,
    /// Standard deviation of the mode amplitudes.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub omega_min: Option<f64>,
    #[arg(long)]
    pub omega_max: Option<f64>,
    /// Strain budget of the linear approximation.
    #[arg(long)]
    pub h_max: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a mode ensemble and write it as JSON.
    Background {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sampling: Sampling,
        /// Rescale amplitudes so the total action equals this value.
        #[arg(long)]
        calibrate: Option<f64>,
    },
    /// Rescale an ensemble to a target total action.
    Calibrate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sampling: Sampling,
        /// Ensemble to rescale; sampled from the config when absent.
        #[arg(long)]
        ensemble: Option<PathBuf>,
        #[arg(long)]
        target: Option<f64>,
    },
    /// Integrate the separation of two test particles to a CSV trajectory.
    Deviation {
        #[command(flatten)]
        common: Common,
        /// Ensemble driving the curvature; constant curvature when absent.
        #[arg(long)]
        ensemble: Option<PathBuf>,
        /// Constant curvature component used without an ensemble.
        #[arg(long, allow_hyphen_values = true)]
        r1010: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        tau_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Initial separation `x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        ell0: Option<String>,
        /// Initial separation rate `x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        ell_dot0: Option<String>,
        /// Spatial position of the particle pair `x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        position: Option<String>,
    },
    /// Evaluate the Bell observable for four polarizer angles.
    Bell {
        #[command(flatten)]
        common: Common,
        /// Polarizer angles `a,a',b,b'` in radians.
        #[arg(long, allow_hyphen_values = true)]
        angles: Option<String>,
        /// Monte Carlo trials per correlator.
        #[arg(long)]
        trials: Option<usize>,
        /// Use the closed-form correlator `cos(b − a)`.
        #[arg(long)]
        analytic: bool,
        /// Search all angles for the maximum (closed-form correlator).
        #[arg(long)]
        scan: bool,
        /// Background ensemble; flat space when absent.
        #[arg(long)]
        ensemble: Option<PathBuf>,
        #[arg(long)]
        coarse_steps: Option<usize>,
        #[arg(long)]
        refine_iters: Option<usize>,
    },
    /// Residuals of the wave equation and its classical limit on a test field.
    Schrodinger {
        #[command(flatten)]
        common: Common,
        /// Phase divisor of the field: 2S0 or S0.
        #[arg(long, value_parser = Variant::parse)]
        variant: Option<Variant>,
        /// Test field: plane_wave or constant.
        #[arg(long, value_parser = Profile::parse)]
        profile: Option<Profile>,
        #[arg(long)]
        grid_n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        x_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x_max: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        momentum: Option<f64>,
        #[arg(long)]
        mass: Option<f64>,
        #[arg(long)]
        s0: Option<f64>,
        #[arg(long)]
        time_step: Option<f64>,
        /// Also write the middle time slice as CSV.
        #[arg(long)]
        wavefield_out: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Background { .. } => "background",
            Command::Calibrate { .. } => "calibrate",
            Command::Deviation { .. } => "deviation",
            Command::Bell { .. } => "bell",
            Command::Schrodinger { .. } => "schrodinger",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Background { common, .. }
            | Command::Calibrate { common, .. }
            | Command::Deviation { common, .. }
            | Command::Bell { common, .. }
            | Command::Schrodinger { common, .. } => common,
        }
    }
}

fn parse_list<const N: usize>(name: &str, text: &str) -> CliResult<[f64; N]> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::invalid(format!("`{name}`: {e}")))?;
    values.try_into().map_err(|v: Vec<f64>| {
        CliError::invalid(format!(
            "`{name}` needs {N} comma-separated values, got {}",
            v.len()
        ))
    })
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn apply_sampling(cfg: &mut RunConfig, s: &Sampling) {
    set(&mut cfg.n_modes, s.n_modes);
    set(&mut cfg.sigma, s.sigma);
    set(&mut cfg.omega_min, s.omega_min);
    set(&mut cfg.omega_max, s.omega_max);
    set(&mut cfg.h_max, s.h_max);
}

/// Defaults, then the config file, then flags.
pub fn resolve_config(command: &Command) -> CliResult<RunConfig> {
    let common = command.common();
    let mut cfg = match &common.config {
        Some(path) => {
            RunConfig::from_json(&fs::read_to_string(path).map_err(|e| CliError::io(path, e))?)?
        }
        None => RunConfig::default(),
    };
    set(&mut cfg.seed, common.seed);
    if common.out.is_some() {
        cfg.out.clone_from(&common.out);
    }
    match command {
        Command::Background {
            sampling,
            calibrate,
            ..
        } => {
            apply_sampling(&mut cfg, sampling);
            if calibrate.is_some() {
                cfg.calibrate = *calibrate;
            }
        }
        Command::Calibrate {
            sampling,
            ensemble,
            target,
            ..
        } => {
            apply_sampling(&mut cfg, sampling);
            if ensemble.is_some() {
                cfg.ensemble.clone_from(ensemble);
            }
            set(&mut cfg.target, *target);
        }
        Command::Deviation {
            ensemble,
            r1010,
            c,
            tau_end,
            dt,
            ell0,
            ell_dot0,
            position,
            ..
        } => {
            if ensemble.is_some() {
                cfg.ensemble.clone_from(ensemble);
            }
            set(&mut cfg.r1010, *r1010);
            set(&mut cfg.c, *c);
            set(&mut cfg.tau_end, *tau_end);
            set(&mut cfg.dt, *dt);
            set(
                &mut cfg.ell0,
                ell0.as_deref().map(|s| parse_list("ell0", s)).transpose()?,
            );
            set(
                &mut cfg.ell_dot0,
                ell_dot0
                    .as_deref()
                    .map(|s| parse_list("ell_dot0", s))
                    .transpose()?,
            );
            set(
                &mut cfg.position,
                position
                    .as_deref()
                    .map(|s| parse_list("position", s))
                    .transpose()?,
            );
        }
        Command::Bell {
            angles,
            trials,
            analytic,
            scan,
            ensemble,
            coarse_steps,
            refine_iters,
            ..
        } => {
            set(
                &mut cfg.angles,
                angles
                    .as_deref()
                    .map(|s| parse_list("angles", s))
                    .transpose()?,
            );
            set(&mut cfg.trials, *trials);
            cfg.analytic |= analytic;
            cfg.scan |= scan;
            if ensemble.is_some() {
                cfg.ensemble.clone_from(ensemble);
            }
            set(&mut cfg.coarse_steps, *coarse_steps);
            set(&mut cfg.refine_iters, *refine_iters);
        }
        Command::Schrodinger {
            variant,
            profile,
            grid_n,
            x_min,
            x_max,
            momentum,
            mass,
            s0,
            time_step,
            wavefield_out,
            ..
        } => {
            set(&mut cfg.variant, *variant);
            set(&mut cfg.profile, *profile);
            set(&mut cfg.grid_n, *grid_n);
            set(&mut cfg.x_min, *x_min);
            set(&mut cfg.x_max, *x_max);
            set(&mut cfg.momentum, *momentum);
            set(&mut cfg.mass, *mass);
            set(&mut cfg.s0, *s0);
            if time_step.is_some() {
                cfg.time_step = *time_step;
            }
            if wavefield_out.is_some() {
                cfg.wavefield_out.clone_from(wavefield_out);
            }
        }
    }
    Ok(cfg)
}

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// SHA-256 over the command, the resolved configuration and every input
/// file, in that order. Output destinations are not inputs and are left out.
pub fn input_hash(command: &str, cfg: &RunConfig, inputs: &[&str]) -> String {
    let inputs_only = RunConfig {
        out: None,
        wavefield_out: None,
        ..cfg.clone()
    };
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update(b"\n");
    h.update(serde_json::to_vec(&inputs_only).expect("config serializes"));
    for input in inputs {
        h.update(b"\n");
        h.update(input.as_bytes());
    }
    hex::encode(h.finalize())
}

fn execute(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let started = Instant::now();
    let name = command.name();
    let cfg = resolve_config(command)?;
    cfg.validate(name)?;
    let ensemble_text = cfg.ensemble.as_deref().map(read_input).transpose()?;
    let inputs: Vec<&str> = ensemble_text.as_deref().into_iter().collect();
    let hash = input_hash(name, &cfg, &inputs);

    let Output {
        artifact,
        result,
        warnings,
        tolerances,
        side_files,
    } = commands::run(name, &cfg, ensemble_text.as_deref())?;

    match &cfg.out {
        Some(path) => write_file(path, &artifact)?,
        None => stdout
            .write_all(artifact.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}")))?,
    }
    for (path, text) in &side_files {
        write_file(path, text)?;
    }

    let report = RunReport {
        command: name.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        input_hash: hash,
        elapsed_s: started.elapsed().as_secs_f64(),
        tolerances,
        warnings,
        config: cfg,
        result,
    };
    for w in &report.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let _ = stderr.write_all(crate::formats::to_json(&report).as_bytes());
    Ok(())
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    1
                }
            };
        }
    };
    match execute(&cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
