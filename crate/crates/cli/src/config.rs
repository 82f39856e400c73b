//! Scenario documents: a JSON object `{"scenarios": [...]}` with strict keys.

use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;
use squeezed_core::analytic::squeeze_from_initial_variance;
use squeezed_core::ensemble::{reparameterize, MixedGaussianSpec, DEFAULT_MC_SAMPLES};
use squeezed_core::oracle::Scheme;
use squeezed_core::{CenterTrajectory, GaussianStateSpec, GridSpec, OscillatorConfig, SqueezeDynamics};

use crate::error::{CliError, CliResult};

/// Grid size used when a scenario does not give one.
pub const DEFAULT_GRID_POINTS: usize = 1024;
/// Default time steps per oscillator period.
pub const DEFAULT_STEPS_PER_PERIOD: f64 = 8192.0;
/// Default sample times per oscillator period.
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 64;
/// Default Gauss–Hermite nodes per axis.
pub const DEFAULT_NODES: usize = 32;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenarios: Vec<RawScenario>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default)]
    oscillator: RawOscillator,
    squeeze: Option<RawSqueeze>,
    initial_variance: Option<f64>,
    #[serde(default)]
    center: RawCenter,
    #[serde(default)]
    sigma_a: f64,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    propagator: RawPropagator,
    #[serde(default)]
    sample_times: RawTimes,
    outputs: Vec<Product>,
    #[serde(default)]
    ensemble: RawEnsemble,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOscillator {
    #[serde(default = "one")]
    mass: f64,
    #[serde(default = "one")]
    angular_frequency: f64,
    #[serde(default = "one")]
    hbar: f64,
}

impl Default for RawOscillator {
    fn default() -> Self {
        Self {
            mass: 1.0,
            angular_frequency: 1.0,
            hbar: 1.0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSqueeze {
    #[serde(rename = "A0")]
    a0: f64,
    #[serde(rename = "dA")]
    da: f64,
    #[serde(default)]
    phi_sq: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCenter {
    #[serde(default)]
    amplitude: f64,
    #[serde(default)]
    phase: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x_min: Option<f64>,
    x_max: Option<f64>,
    #[serde(default = "default_points")]
    n_points: usize,
}

fn default_points() -> usize {
    DEFAULT_GRID_POINTS
}

impl Default for RawGrid {
    fn default() -> Self {
        Self {
            x_min: None,
            x_max: None,
            n_points: DEFAULT_GRID_POINTS,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SchemeName {
    ImplicitUnitary,
    #[default]
    SpectralSplitStep,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPropagator {
    #[serde(default)]
    scheme: SchemeName,
    dt: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawTimes {
    List(Vec<f64>),
    Periodic(RawPeriodic),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPeriodic {
    periods: f64,
    per_period: usize,
}

impl Default for RawTimes {
    fn default() -> Self {
        RawTimes::Periodic(RawPeriodic {
            periods: 1.0,
            per_period: DEFAULT_SAMPLES_PER_PERIOD,
        })
    }
}

/// Artifacts a scenario can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Product {
    Timeseries,
    Wavefunction,
    Density,
    Verify,
}

/// How the mixed-state closed form is cross-checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleMethod {
    #[default]
    GaussHermite,
    MonteCarlo,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    #[serde(default)]
    method: EnsembleMethod,
    #[serde(default = "default_nodes")]
    nodes: usize,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default)]
    seed: u64,
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}

fn default_samples() -> usize {
    DEFAULT_MC_SAMPLES
}

impl Default for RawEnsemble {
    fn default() -> Self {
        Self {
            method: EnsembleMethod::GaussHermite,
            nodes: DEFAULT_NODES,
            samples: DEFAULT_MC_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSettings {
    pub method: EnsembleMethod,
    pub nodes: usize,
    pub samples: usize,
    pub seed: u64,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    /// The state whose closed forms are evaluated; for a mixture this is the
    /// reparameterized spec with `P > 1`.
    pub state: GaussianStateSpec,
    /// The center spread that produced `state`, if any.
    pub mixture: Option<MixedGaussianSpec>,
    pub grid: GridSpec,
    pub scheme: Scheme,
    pub dt: f64,
    pub sample_times: Vec<f64>,
    pub outputs: Vec<Product>,
    pub ensemble: EnsembleSettings,
}

impl Scenario {
    pub fn wants(&self, product: Product) -> bool {
        self.outputs.contains(&product)
    }

    pub fn is_pure(&self) -> bool {
        self.state.is_pure()
    }
}

/// Reads and validates a scenario document.
pub fn load(path: &Path) -> CliResult<Vec<Scenario>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse {
        path: path.to_owned(),
        message: format!("cannot read: {e}"),
    })?;
    parse(&text).map_err(|e| match e {
        CliError::Parse { message, .. } => CliError::Parse {
            path: path.to_owned(),
            message,
        },
        other => other,
    })
}

/// Parses and validates a scenario document held in memory.
pub fn parse(text: &str) -> CliResult<Vec<Scenario>> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: "<memory>".into(),
        message: e.to_string(),
    })?;
    if file.scenarios.is_empty() {
        return Err(CliError::Parse {
            path: "<memory>".into(),
            message: "the scenarios list is empty".into(),
        });
    }
    let mut names = HashSet::new();
    let mut scenarios = Vec::with_capacity(file.scenarios.len());
    for raw in file.scenarios {
        if !names.insert(raw.name.clone()) {
            return Err(CliError::invariant(&raw.name, "scenario names must be unique"));
        }
        scenarios.push(build(raw)?);
    }
    Ok(scenarios)
}

fn build(raw: RawScenario) -> CliResult<Scenario> {
    let name = raw.name;
    let fail = |e: squeezed_core::Error| CliError::invariant(&name, e);
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        return Err(CliError::invariant(
            &name,
            "scenario name must be non-empty and use only letters, digits, '-' and '_'",
        ));
    }
    let osc = OscillatorConfig::new(raw.oscillator.mass, raw.oscillator.angular_frequency, raw.oscillator.hbar)
        .map_err(fail)?;
    let squeeze = match (raw.squeeze, raw.initial_variance) {
        (Some(_), Some(_)) => {
            return Err(CliError::Parse {
                path: "<memory>".into(),
                message: format!("scenario {name:?} gives both squeeze and initial_variance"),
            })
        }
        (Some(s), None) => SqueezeDynamics::new(s.a0, s.da, s.phi_sq).map_err(fail)?,
        (None, Some(d)) => squeeze_from_initial_variance(d, &osc).map_err(fail)?,
        (None, None) => SqueezeDynamics::ground(),
    };
    let center = CenterTrajectory::new(raw.center.amplitude, raw.center.phase).map_err(fail)?;
    let base = GaussianStateSpec::new(osc, squeeze, center);

    let (state, mixture) = if raw.sigma_a != 0.0 {
        let mixed = MixedGaussianSpec::new(base, raw.sigma_a).map_err(fail)?;
        (reparameterize(&mixed), Some(mixed))
    } else {
        (base, None)
    };

    let grid = match (raw.grid.x_min, raw.grid.x_max) {
        (Some(lo), Some(hi)) => GridSpec::covering(lo, hi, raw.grid.n_points, &state).map_err(fail)?,
        (None, None) => GridSpec::for_state(&state, raw.grid.n_points).map_err(fail)?,
        _ => {
            return Err(CliError::invariant(&name, "grid needs both x_min and x_max, or neither"));
        }
    };

    let scheme = match raw.propagator.scheme {
        SchemeName::ImplicitUnitary => Scheme::ImplicitUnitary,
        SchemeName::SpectralSplitStep => Scheme::SpectralSplitStep,
    };
    let dt = raw.propagator.dt.unwrap_or(osc.period() / DEFAULT_STEPS_PER_PERIOD);
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(CliError::invariant(&name, format!("invariant violated: dt > 0 (dt = {dt})")));
    }

    let sample_times = match raw.sample_times {
        RawTimes::List(times) => times,
        RawTimes::Periodic(p) => {
            let count = (p.periods * p.per_period as f64).round();
            if !(p.periods > 0.0 && p.per_period > 0 && count >= 1.0 && count.is_finite()) {
                return Err(CliError::invariant(
                    &name,
                    "sample_times needs periods > 0 and per_period >= 1",
                ));
            }
            let step = osc.period() / p.per_period as f64;
            (0..=count as usize).map(|k| k as f64 * step).collect()
        }
    };
    check_times(&name, &sample_times)?;

    let mut outputs = Vec::new();
    for product in raw.outputs {
        if !outputs.contains(&product) {
            outputs.push(product);
        }
    }
    if outputs.contains(&Product::Wavefunction) && !state.is_pure() {
        return Err(CliError::invariant(&name, "the wavefunction output requires a pure state (sigma_a = 0, P = 1)"));
    }
    if raw.ensemble.method == EnsembleMethod::GaussHermite && raw.ensemble.nodes < squeezed_core::ensemble::MIN_NODES {
        return Err(CliError::invariant(
            &name,
            format!("ensemble nodes >= {} (got {})", squeezed_core::ensemble::MIN_NODES, raw.ensemble.nodes),
        ));
    }
    if raw.ensemble.samples == 0 {
        return Err(CliError::invariant(&name, "ensemble samples >= 1"));
    }

    Ok(Scenario {
        name,
        state,
        mixture,
        grid,
        scheme,
        dt,
        sample_times,
        outputs,
        ensemble: EnsembleSettings {
            method: raw.ensemble.method,
            nodes: raw.ensemble.nodes,
            samples: raw.ensemble.samples,
            seed: raw.ensemble.seed,
        },
    })
}

fn check_times(name: &str, times: &[f64]) -> CliResult<()> {
    if times.is_empty() {
        return Err(CliError::invariant(name, "sample_times must be non-empty"));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(CliError::invariant(name, "sample_times must be >= 0"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::invariant(name, "sample_times must be strictly increasing"));
    }
    Ok(())
}
