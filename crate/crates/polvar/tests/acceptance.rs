//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::fs;
use std::panic;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use polvar::formats::{read_ensemble_json, read_trajectory_csv, BellReport, ResidualReport};
use polvar_core::background::{
    evaluate_h, gauge_residuals, riemann_r1010, sample_ensemble, BackgroundEnsemble, EnsembleSpec,
};
use polvar_core::bell::{bell_observable, cos_correlator, BellSettings};
use polvar_core::probability::{
    check_probability_axioms, normalize_wavefield, weighted_norm, Grid, MetricWeight, WaveField,
};
use polvar_core::rng::{self, Domain};
use polvar_core::FourVector;
use rand::Rng;

const ANALYTIC_S_TOL: f64 = 1e-12;
const ANALYTIC_TIME: Duration = Duration::from_millis(100);
const BOUND_SLACK: f64 = 1e-9;
const RANDOM_QUADRUPLES: usize = 1000;
const BOUND_TIME: Duration = Duration::from_secs(1);
const MC_ANGLES: usize = 20;
const MC_REQUIRED: usize = 18;
const MC_TRIALS: usize = 100_000;
const MC_SIGMAS: f64 = 3.0;
const MC_TIME: Duration = Duration::from_secs(5);
const METRIC_FACTOR_BAND: (f64, f64) = (0.99, 1.01);
const CLOSED_FORM_TOL: f64 = 1e-6;
const ORDER_RATIO_BAND: (f64, f64) = (13.6, 18.4);
const GAUGE_MODES: usize = 10_000;
const GAUGE_TOL: f64 = 1e-12;
const RIEMANN_POINTS: u64 = 100;
const RIEMANN_REL_TOL: f64 = 1e-6;
const CONSISTENT_RESIDUAL_TOL: f64 = 1e-8;
const FACTOR_TWO_REL_TOL: f64 = 0.1;
const NORM_TOL: f64 = 1e-10;
const IDEMPOTENCE_TOL: f64 = 1e-12;
const CALIBRATION_REL_TOL: f64 = 1e-12;
const AXIOM_SCAN_POINTS: usize = 1000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn polvar(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_polvar"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(out.stdout)
    } else {
        Err(format!(
            "polvar {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bell_analytic_value() -> Outcome {
    let angles = format!("{},{},{},{}", 0.0, -PI / 2.0, -PI / 4.0, PI / 4.0);
    let start = Instant::now();
    let out = polvar(&["bell", "--analytic", "--angles", &angles])?;
    let elapsed = start.elapsed();
    let rep: BellReport = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let err = (rep.s - SQRT_2).abs();
    check(
        err <= ANALYTIC_S_TOL && rep.within_bound && elapsed < ANALYTIC_TIME,
        format!(
            "S = {} (|S − √2| = {err:.1e}), within_bound = {}, {elapsed:.2?}",
            rep.s, rep.within_bound
        ),
    )
}

fn bell_bound_property() -> Outcome {
    let start = Instant::now();
    let mut rng = rng::stream(2024, Domain::Trial, 0);
    let mut worst = 0.0f64;
    for _ in 0..RANDOM_QUADRUPLES {
        let angles = [(); 4].map(|_| rng.random_range(0.0..TAU));
        worst = worst.max(bell_observable(
            &BellSettings::from_angles(angles),
            cos_correlator,
        ));
    }
    let elapsed = start.elapsed();
    check(
        worst <= SQRT_2 + BOUND_SLACK && elapsed < BOUND_TIME,
        format!("max S over {RANDOM_QUADRUPLES} quadruples = {worst:.15}, {elapsed:.2?}"),
    )
}

fn monte_carlo_correlator() -> Outcome {
    let mut rng = rng::stream(77, Domain::Trial, 0);
    let trials = MC_TRIALS.to_string();
    let start = Instant::now();
    let mut hits = 0;
    for k in 0..MC_ANGLES {
        let theta: f64 = rng.random_range(0.0..TAU);
        let angles = format!("0,0,{theta},{theta}");
        let seed = k.to_string();
        let out = polvar(&[
            "bell", "--trials", &trials, "--angles", &angles, "--seed", &seed,
        ])?;
        let rep: BellReport = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        let stderr = rep.stderr.ok_or("missing stderr")?.ab;
        if (rep.m.ab.abs() - theta.cos().abs()).abs() <= MC_SIGMAS * stderr {
            hits += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        hits >= MC_REQUIRED && elapsed < MC_TIME,
        format!("{hits}/{MC_ANGLES} angles within {MC_SIGMAS}·stderr of |cos θ|, {elapsed:.2?}"),
    )
}

fn weak_field_metric_average() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = dir.path().join("strained.json");
    let path = file.to_str().unwrap();
    // σ far above the budget, so the sampler caps the peak strain at h_max
    polvar(&[
        "background",
        "--n-modes",
        "16",
        "--sigma",
        "1",
        "--h-max",
        "1e-3",
        "--omega-min",
        "1",
        "--omega-max",
        "10",
        "--seed",
        "4",
        "--out",
        path,
    ])?;
    let ens = read_ensemble_json(&fs::read_to_string(&file).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let trials = MC_TRIALS.to_string();
    let out = polvar(&[
        "bell",
        "--ensemble",
        path,
        "--trials",
        &trials,
        "--seed",
        "1",
    ])?;
    let rep: BellReport = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let m = rep.metric_factor_mean;
    check(
        (METRIC_FACTOR_BAND.0..=METRIC_FACTOR_BAND.1).contains(&m),
        format!(
            "metric_factor_mean = {m:.6} at peak strain {:.3e}",
            ens.peak_strain()
        ),
    )
}

fn deviation_error(r1010: f64, tau_end: f64, dt: f64) -> Result<f64, String> {
    let out = polvar(&[
        "deviation",
        "--r1010",
        &r1010.to_string(),
        "--tau-end",
        &tau_end.to_string(),
        "--dt",
        &dt.to_string(),
    ])?;
    let rows = read_trajectory_csv(&String::from_utf8_lossy(&out)).map_err(|e| e.to_string())?;
    let omega = r1010.sqrt();
    Ok(rows
        .iter()
        .map(|r| (r[1] - (omega * r[0]).cos()).abs())
        .fold(0.0, f64::max))
}

fn deviation_dynamics() -> Outcome {
    let omega = 1.0;
    let ten_periods = 10.0 * TAU / omega;
    let err = deviation_error(omega * omega, ten_periods, 0.01)?;
    let coarse = deviation_error(omega * omega, ten_periods, TAU / 100.0)?;
    let fine = deviation_error(omega * omega, ten_periods, TAU / 200.0)?;
    let ratio = coarse / fine;
    check(
        err <= CLOSED_FORM_TOL && (ORDER_RATIO_BAND.0..=ORDER_RATIO_BAND.1).contains(&ratio),
        format!("max error {err:.2e} over 10 periods, halving dt shrinks error {ratio:.2}×"),
    )
}

fn gauge_invariants() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = dir.path().join("modes.json");
    let n = GAUGE_MODES.to_string();
    polvar(&[
        "background",
        "--n-modes",
        &n,
        "--sigma",
        "1e-4",
        "--omega-min",
        "0.5",
        "--omega-max",
        "5",
        "--seed",
        "6",
        "--out",
        file.to_str().unwrap(),
    ])?;
    let ens = read_ensemble_json(&fs::read_to_string(&file).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let (mut harmonic, mut field, mut null) = (0.0f64, 0.0f64, 0.0f64);
    for m in ens.modes() {
        let r = gauge_residuals(m);
        harmonic = harmonic.max(r.harmonic);
        field = field.max(r.field_equation);
        let k = m.wave_vector();
        null = null.max(k.minkowski_dot(&k).abs());
    }
    check(
        ens.modes().len() == GAUGE_MODES
            && harmonic <= GAUGE_TOL
            && field <= GAUGE_TOL
            && null <= GAUGE_TOL,
        format!(
            "{} modes: harmonic {harmonic:.1e}, field equation {field:.1e}, |k·k| {null:.1e}",
            ens.modes().len()
        ),
    )
}

/// Richardson-extrapolated central second difference of `f` along `mu`, `nu`.
fn second_partial(
    f: &dyn Fn(&FourVector) -> f64,
    x: &FourVector,
    mu: usize,
    nu: usize,
    delta: f64,
) -> f64 {
    let shift = |x: &FourVector, i: usize, d: f64| {
        let mut y = *x;
        y.0[i] += d;
        y
    };
    let at_step = |d: f64| {
        if mu == nu {
            (f(&shift(x, mu, d)) - 2.0 * f(x) + f(&shift(x, mu, -d))) / (d * d)
        } else {
            let pp = f(&shift(&shift(x, mu, d), nu, d));
            let pm = f(&shift(&shift(x, mu, d), nu, -d));
            let mp = f(&shift(&shift(x, mu, -d), nu, d));
            let mm = f(&shift(&shift(x, mu, -d), nu, -d));
            (pp - pm - mp + mm) / (4.0 * d * d)
        }
    };
    (4.0 * at_step(delta / 2.0) - at_step(delta)) / 3.0
}

fn r1010_oracle(ens: &BackgroundEnsemble, x: &FourVector) -> f64 {
    let h = |mu: usize, nu: usize| move |y: &FourVector| evaluate_h(ens, y).get(mu, nu);
    let delta = 1e-2 / ens.max_omega();
    let d = |mu, nu, a, b| second_partial(&h(a, b), x, mu, nu, delta);
    // lower-index component from second derivatives of h, raised with η¹¹ = −1
    -0.5 * (d(0, 1, 1, 0) + d(1, 0, 0, 1) - d(0, 0, 1, 1) - d(1, 1, 0, 0))
}

fn riemann_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for trial in 0..RIEMANN_POINTS {
        let mut rng = rng::stream(500 + trial, Domain::Trial, 0);
        let ens = sample_ensemble(&EnsembleSpec {
            n_modes: rng.random_range(1..=5),
            sigma: 1.0,
            omega_min: 0.5,
            omega_max: 5.0,
            h_max: 1e-3,
            seed: 9000 + trial,
        })
        .map_err(|e| e.to_string())?;
        let x = FourVector([
            rng.random_range(0.0..10.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
        ]);
        let analytic = riemann_r1010(&ens, &x);
        worst = worst.max((analytic - r1010_oracle(&ens, &x)).abs() / analytic.abs());
    }
    check(
        worst <= RIEMANN_REL_TOL,
        format!("worst relative error {worst:.2e} over {RIEMANN_POINTS} points"),
    )
}

fn schrodinger_consistency() -> Outcome {
    let run = |variant: &str| -> Result<ResidualReport, String> {
        let out = polvar(&[
            "schrodinger",
            "--variant",
            variant,
            "--grid-n",
            "512",
            "--momentum",
            "1",
            "--mass",
            "1",
            "--s0",
            "0.5",
        ])?;
        serde_json::from_slice(&out).map_err(|e| e.to_string())
    };
    let good = run("2S0")?;
    let bad = run("S0")?;
    // E = p²/2m with p = m = 1
    let two_e = 1.0;
    let rel = (bad.residual_max - two_e).abs() / two_e;
    check(
        good.residual_max <= CONSISTENT_RESIDUAL_TOL && rel <= FACTOR_TWO_REL_TOL,
        format!(
            "2S0 residual {:.2e}; S0 residual {:.6} vs 2E = {two_e} ({:.1e} relative)",
            good.residual_max, bad.residual_max, rel
        ),
    )
}

fn normalization() -> Outcome {
    let grid = Grid::new(-4.0, 4.0, 1025).map_err(|e| e.to_string())?;
    let field = WaveField::sample(grid, 1.0, |x| {
        Complex64::new((1.5 * x).cos(), (1.5 * x).sin()) * (3.0 * (-x * x).exp() * (1.0 + 0.2 * x))
    });
    let weight: Vec<f64> = grid
        .points()
        .map(|x| 1.0 - 2e-3 * (3.0 * x).cos())
        .collect();
    let w = MetricWeight::Scalar(&weight);
    let once = normalize_wavefield(&field, w).map_err(|e| e.to_string())?;
    let twice = normalize_wavefield(&once, w).map_err(|e| e.to_string())?;
    let norm_err = (weighted_norm(&once, w).map_err(|e| e.to_string())? - 1.0).abs();
    let drift = once
        .psi
        .iter()
        .zip(&twice.psi)
        .map(|(a, b)| (a - b).norm_sqr().sqrt())
        .fold(0.0, f64::max);
    check(
        norm_err <= NORM_TOL && drift <= IDEMPOTENCE_TOL,
        format!("|norm − 1| = {norm_err:.1e}, renormalization moves ψ by {drift:.1e}"),
    )
}

fn action_calibration() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = dir.path().join("calibrated.json");
    polvar(&[
        "calibrate",
        "--target",
        "1.0",
        "--seed",
        "3",
        "--out",
        file.to_str().unwrap(),
    ])?;
    let ens = read_ensemble_json(&fs::read_to_string(&file).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    // S_j = (T/32π) ω² (A+² + A×²) over one period T = 2π/ω
    let total: f64 = ens
        .modes()
        .iter()
        .map(|m| {
            TAU / m.omega() / (32.0 * PI)
                * m.omega()
                * m.omega()
                * (m.amp_plus().powi(2) + m.amp_cross().powi(2))
        })
        .sum();
    let rel = (total - 1.0).abs();
    check(
        rel <= CALIBRATION_REL_TOL,
        format!("ΣS_j recomputed from file = {total:.17} ({rel:.1e} relative)"),
    )
}

fn probability_axioms() -> Outcome {
    let sigma = 1.0;
    let report = check_probability_axioms(
        sigma,
        &[[sigma, sigma, 2.0 * sigma], [0.0, 0.0, 0.0]],
        AXIOM_SCAN_POINTS,
    )
    .map_err(|e| e.to_string())?;
    let flagged = report
        .triples
        .iter()
        .filter(|t| !t.literal_reading_holds)
        .count();
    check(
        report.non_increasing && flagged == report.triples.len(),
        format!(
            "monotone on {} points: {}; literal P21 + P32 ≤ P31 fails on {flagged}/{} documented triples",
            report.scan_points,
            report.non_increasing,
            report.triples.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "Bell value at the maximal angles (analytic)",
            bell_analytic_value,
        ),
        ("Bell bound on random quadruples", bell_bound_property),
        (
            "Monte Carlo correlator in flat space",
            monte_carlo_correlator,
        ),
        ("weak-field metric average", weak_field_metric_average),
        ("deviation dynamics vs closed form", deviation_dynamics),
        ("gauge and field-equation invariants", gauge_invariants),
        ("Riemann component vs finite differences", riemann_oracle),
        (
            "wave-equation consistency and factor-2 diagnostic",
            schrodinger_consistency,
        ),
        ("wavefield normalization", normalization),
        ("action calibration", action_calibration),
        ("probability-axiom report", probability_axioms),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".to_string()));
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name}: {detail}", i + 1);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
