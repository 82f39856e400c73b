//! Per-scenario pipeline: closed-form time series, numeric fidelity and
//! verification checks.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use squeezed_core::analytic::{
    accumulated_phase, center_state, default_fd_step, eval_pure_density, eval_pure_wavefunction, ode_residuals,
    quadrature_shape, schrodinger_residual,
};
use squeezed_core::ensemble::{ensemble_average_density, eval_mixed_density, monte_carlo_average};
use squeezed_core::oracle::{fidelity, purity, Propagator};
use squeezed_core::{DensityMatrixSample, Error, Moments};

use crate::config::{EnsembleMethod, Product, Scenario};
use crate::dump::{fmt, write_density};
use crate::error::{CliError, CliResult};

pub const TIMESERIES_HEADER: &str =
    "t,A,B,phi,x_c,p_c,var_x,var_p,cov_xp,uncertainty_product,purity,fidelity_numeric";

pub const FIDELITY_TOLERANCE: f64 = 1e-6;
pub const ODE_TOLERANCE: f64 = 1e-6;
pub const SCHRODINGER_TOLERANCE: f64 = 1e-5;
pub const VARIANCE_TOLERANCE: f64 = 1e-8;
pub const TRACE_TOLERANCE: f64 = 1e-8;
pub const PURITY_TOLERANCE: f64 = 1e-5;
pub const ENSEMBLE_TOLERANCE: f64 = 1e-8;
pub const MONTE_CARLO_TOLERANCE: f64 = 1e-3;

/// One row of the time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub phi: Option<f64>,
    pub x_c: f64,
    pub p_c: f64,
    pub moments: Moments,
    pub purity: f64,
    pub fidelity: Option<f64>,
}

/// Core errors about the inputs are invariant violations; numerical breakdowns
/// are verification failures.
pub(crate) fn classify(scenario: &str, err: Error) -> CliError {
    match err {
        Error::BoundaryContamination { .. } | Error::Convergence { .. } => {
            CliError::Verification(format!("scenario {scenario:?}: {err}"))
        }
        other => CliError::invariant(scenario, other),
    }
}

fn density_at(sc: &Scenario, t: f64) -> Result<DensityMatrixSample, Error> {
    if sc.is_pure() {
        eval_pure_density(&sc.state, &sc.grid, t)
    } else {
        eval_mixed_density(&sc.state, &sc.grid, t)
    }
}

/// Numerically propagated wavefunctions at the sample times, starting from the
/// closed form at `t = 0`. Each interval is split into equal steps no longer
/// than the configured `dt`.
fn propagated(sc: &Scenario) -> Result<Vec<Vec<num_complex::Complex64>>, Error> {
    let osc = sc.state.osc;
    let mut psi = eval_pure_wavefunction(&sc.state, &sc.grid, 0.0)?.into_values();
    let mut t = 0.0;
    let mut stepper: Option<Propagator> = None;
    let mut out = Vec::with_capacity(sc.sample_times.len());
    for &target in &sc.sample_times {
        let span = target - t;
        if span > 0.0 {
            let steps = ((span / sc.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            let reusable = stepper
                .as_ref()
                .is_some_and(|p| (p.dt() - dt).abs() <= 1e-12 * dt);
            if !reusable {
                stepper = Some(Propagator::new(&sc.grid, &osc, sc.scheme, dt)?);
            }
            stepper.as_mut().expect("set above").advance(&mut psi, t, steps)?;
            t = target;
        }
        out.push(psi.clone());
    }
    Ok(out)
}

/// Computes the time series of a scenario.
pub fn timeseries(sc: &Scenario) -> CliResult<Vec<Row>> {
    let err = |e| classify(&sc.name, e);
    let osc = sc.state.osc;
    let hbar = osc.hbar();
    let numeric = if sc.is_pure() { Some(propagated(sc).map_err(err)?) } else { None };
    let mut rows = Vec::with_capacity(sc.sample_times.len());
    for (k, &t) in sc.sample_times.iter().enumerate() {
        let (a, b) = quadrature_shape(&sc.state.squeeze, osc.angular_frequency(), t);
        let (x_c, p_c) = center_state(&sc.state.center, &osc, t);
        let row = if let Some(numeric) = &numeric {
            let psi = eval_pure_wavefunction(&sc.state, &sc.grid, t).map_err(err)?;
            let moments = psi.moments(hbar).map_err(err)?;
            let evolved = squeezed_core::WavefunctionSample::from_parts(sc.grid, numeric[k].clone(), t).map_err(err)?;
            Row {
                t,
                a,
                b,
                phi: Some(accumulated_phase(&sc.state.squeeze, &sc.state.center, &osc, t).map_err(err)?),
                x_c,
                p_c,
                moments,
                purity: psi.norm().powi(2),
                fidelity: Some(fidelity(&psi, &evolved).map_err(err)?),
            }
        } else {
            let rho = eval_mixed_density(&sc.state, &sc.grid, t).map_err(err)?;
            Row {
                t,
                a,
                b,
                phi: None,
                x_c,
                p_c,
                moments: rho.moments(hbar).map_err(err)?,
                purity: purity(&rho),
                fidelity: None,
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

pub fn render_timeseries(rows: &[Row]) -> String {
    let mut out = String::from(TIMESERIES_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
    for r in rows {
        let m = &r.moments;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt(r.t),
            fmt(r.a),
            fmt(r.b),
            opt(r.phi),
            fmt(r.x_c),
            fmt(r.p_c),
            fmt(m.var_x),
            fmt(m.var_p),
            fmt(m.cov_xp),
            fmt(m.uncertainty_product),
            fmt(r.purity),
            opt(r.fidelity),
        );
    }
    out
}

/// Outcome of one verification check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn bound(name: &'static str, worst: f64, limit: f64) -> Self {
        Self {
            name,
            passed: worst <= limit,
            detail: format!("worst {worst:.3e}, limit {limit:.0e}"),
        }
    }
}

/// Runs the verification checks against the time series.
pub fn verify(sc: &Scenario, rows: &[Row], seed: Option<u64>) -> CliResult<Vec<Check>> {
    let err = |e| classify(&sc.name, e);
    let osc = sc.state.osc;
    let mut checks = Vec::new();
    let variance_dev = rows
        .iter()
        .map(|r| (r.moments.var_x - osc.ground_variance() * r.a).abs() / (osc.ground_variance() * r.a))
        .fold(0.0, f64::max);
    checks.push(Check::bound("var_x = sigma_gr^2 A (relative)", variance_dev, VARIANCE_TOLERANCE));

    if sc.is_pure() {
        let infidelity = rows
            .iter()
            .map(|r| 1.0 - r.fidelity.unwrap_or(0.0))
            .fold(0.0, f64::max);
        checks.push(Check::bound("propagated fidelity >= 1 - 1e-6", infidelity, FIDELITY_TOLERANCE));
        let fd = default_fd_step(&osc);
        let ode = rows
            .iter()
            .map(|r| ode_residuals(&sc.state.squeeze, &osc, r.t, fd).max())
            .fold(0.0, f64::max);
        checks.push(Check::bound("shape and phase ODE residuals", ode, ODE_TOLERANCE));
        let mut schrodinger: f64 = 0.0;
        for r in rows {
            schrodinger = schrodinger.max(schrodinger_residual(&sc.state, &sc.grid, r.t, fd).map_err(err)?);
        }
        checks.push(Check::bound("Schrodinger residual", schrodinger, SCHRODINGER_TOLERANCE));
        let bound = rows
            .iter()
            .map(|r| (0.5 * osc.hbar() - r.moments.uncertainty_product) / (0.5 * osc.hbar()))
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::bound("sigma_x sigma_p >= hbar/2", bound.max(0.0), 1e-8));
    } else {
        let mut trace_dev: f64 = 0.0;
        for r in rows {
            let rho = eval_mixed_density(&sc.state, &sc.grid, r.t).map_err(err)?;
            trace_dev = trace_dev.max((rho.trace() - 1.0).abs());
        }
        checks.push(Check::bound("trace = 1", trace_dev, TRACE_TOLERANCE));
        let target = 1.0 / sc.state.purity_product().sqrt();
        let purity_dev = rows.iter().map(|r| (r.purity - target).abs()).fold(0.0, f64::max);
        checks.push(Check::bound("purity = 1/sqrt(P)", purity_dev, PURITY_TOLERANCE));
        if let Some(mixture) = &sc.mixture {
            let t = rows[0].t;
            let reference = eval_mixed_density(&sc.state, &sc.grid, t).map_err(err)?;
            match sc.ensemble.method {
                EnsembleMethod::GaussHermite => {
                    let check = match ensemble_average_density(mixture, &sc.grid, t, sc.ensemble.nodes) {
                        Ok(avg) => Check::bound(
                            "Gauss-Hermite ensemble = closed form (peak-relative)",
                            reference.peak_relative_deviation(&avg).map_err(err)?,
                            ENSEMBLE_TOLERANCE,
                        ),
                        Err(e @ Error::Convergence { .. }) => Check {
                            name: "Gauss-Hermite ensemble = closed form (peak-relative)",
                            passed: false,
                            detail: e.to_string(),
                        },
                        Err(e) => return Err(err(e)),
                    };
                    checks.push(check);
                }
                EnsembleMethod::MonteCarlo => {
                    let seed = seed.unwrap_or(sc.ensemble.seed);
                    let avg = monte_carlo_average(mixture, &sc.grid, t, sc.ensemble.samples, seed).map_err(err)?;
                    checks.push(Check::bound(
                        "Monte Carlo ensemble = closed form (peak-relative)",
                        reference.peak_relative_deviation(&avg).map_err(err)?,
                        MONTE_CARLO_TOLERANCE,
                    ));
                }
            }
        }
    }
    Ok(checks)
}

pub fn render_checks(sc: &Scenario, checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status} {}: {} ({})", sc.name, c.name, c.detail);
    }
    out
}

/// What one scenario produced.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub report: String,
    pub failed_checks: usize,
}

fn write(path: PathBuf, contents: &str, files: &mut Vec<PathBuf>) -> CliResult<()> {
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    files.push(path);
    Ok(())
}

/// Writes every product the scenario requests (or only the report when
/// `verify_only`) into `out_dir`.
pub fn execute(sc: &Scenario, out_dir: &Path, seed: Option<u64>, verify_only: bool) -> CliResult<Outcome> {
    let mut outcome = Outcome::default();
    let wants = |p| if verify_only { p == Product::Verify } else { sc.wants(p) };
    let need_rows = wants(Product::Timeseries) || wants(Product::Verify);
    let rows = if need_rows { timeseries(sc)? } else { Vec::new() };
    if wants(Product::Timeseries) {
        let path = out_dir.join(format!("{}.timeseries.csv", sc.name));
        write(path, &render_timeseries(&rows), &mut outcome.files)?;
    }
    if wants(Product::Wavefunction) {
        let mut text = String::from("t,x,re,im\n");
        for &t in &sc.sample_times {
            let psi = eval_pure_wavefunction(&sc.state, &sc.grid, t).map_err(|e| classify(&sc.name, e))?;
            for (x, z) in sc.grid.points().into_iter().zip(psi.values()) {
                let _ = writeln!(text, "{},{},{},{}", fmt(t), fmt(x), fmt(z.re), fmt(z.im));
            }
        }
        write(out_dir.join(format!("{}.wavefunction.csv", sc.name)), &text, &mut outcome.files)?;
    }
    if wants(Product::Density) {
        let t = *sc.sample_times.last().expect("non-empty sample times");
        let path = out_dir.join(format!("{}.density.txt", sc.name));
        dump_density(sc, t, &path)?;
        outcome.files.push(path);
    }
    if wants(Product::Verify) {
        let checks = verify(sc, &rows, seed)?;
        outcome.failed_checks = checks.iter().filter(|c| !c.passed).count();
        outcome.report = render_checks(sc, &checks);
        write(out_dir.join(format!("{}.verify.txt", sc.name)), &outcome.report, &mut outcome.files)?;
    }
    Ok(outcome)
}

/// Writes the closed-form density matrix at time `t`.
pub fn dump_density(sc: &Scenario, t: f64, path: &Path) -> CliResult<()> {
    let dm = density_at(sc, t).map_err(|e| classify(&sc.name, e))?;
    write_density(path, &dm)
}
