//! Physical parameters of the oscillator and of the Gaussian states evolving in it.

use crate::error::{invariant, Error, Result};

/// Tolerance on the redundant mixedness product `P` and on the pure-state test `P = 1`.
pub const PURITY_PRODUCT_TOLERANCE: f64 = 1e-12;

/// Mass, angular frequency and reduced Planck constant of a 1-D harmonic oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorConfig {
    mass: f64,
    angular_frequency: f64,
    hbar: f64,
}

impl OscillatorConfig {
    pub fn new(mass: f64, angular_frequency: f64, hbar: f64) -> Result<Self> {
        for (name, value) in [("m > 0", mass), ("omega > 0", angular_frequency), ("hbar > 0", hbar)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(invariant(name, format!("got {value}")));
            }
        }
        Ok(Self {
            mass,
            angular_frequency,
            hbar,
        })
    }

    /// Natural units, `ħ = m = ω = 1`.
    pub fn natural() -> Self {
        Self {
            mass: 1.0,
            angular_frequency: 1.0,
            hbar: 1.0,
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn angular_frequency(&self) -> f64 {
        self.angular_frequency
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Position variance of the ground state, `ħ / 2mω`.
    pub fn ground_variance(&self) -> f64 {
        self.hbar / (2.0 * self.mass * self.angular_frequency)
    }

    /// Oscillation period `2π/ω`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.angular_frequency
    }

    /// Harmonic potential `mω²x²/2`.
    pub fn potential(&self, x: f64) -> f64 {
        0.5 * self.mass * self.angular_frequency * self.angular_frequency * x * x
    }
}

impl Default for OscillatorConfig {
    fn default() -> Self {
        Self::natural()
    }
}

/// Squeezing oscillation `A(t) = A0 + ΔA cos(2ωt + φ_sq)`, `B(t) = ΔA sin(2ωt + φ_sq)`.
///
/// `A0 > ΔA ≥ 0` keeps the dimensionless variance positive; the product
/// `(A0 + ΔA)(A0 − ΔA)` is the mixedness `P`, equal to one for pure states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeDynamics {
    mean_variance: f64,
    amplitude: f64,
    phase: f64,
}

impl SqueezeDynamics {
    pub fn new(mean_variance: f64, amplitude: f64, phase: f64) -> Result<Self> {
        if !(mean_variance.is_finite() && amplitude.is_finite() && phase.is_finite()) {
            return Err(invariant(
                "finite squeeze parameters",
                format!("A0 = {mean_variance}, dA = {amplitude}, phi_sq = {phase}"),
            ));
        }
        if !(amplitude >= 0.0) {
            return Err(invariant("dA >= 0", format!("dA = {amplitude}")));
        }
        if !(mean_variance > amplitude) {
            return Err(invariant(
                "A0 > dA",
                format!("A0 = {mean_variance}, dA = {amplitude}"),
            ));
        }
        let product = (mean_variance + amplitude) * (mean_variance - amplitude);
        if product < 1.0 - PURITY_PRODUCT_TOLERANCE {
            return Err(invariant(
                "P = (A0 + dA)(A0 - dA) >= 1",
                format!("A0 = {mean_variance}, dA = {amplitude}, P = {product}"),
            ));
        }
        Ok(Self {
            mean_variance,
            amplitude,
            phase,
        })
    }

    /// Pure squeezing with the given mean variance; `ΔA = √(A0² − 1)`.
    pub fn pure(mean_variance: f64, phase: f64) -> Result<Self> {
        if !(mean_variance >= 1.0) {
            return Err(invariant(
                "A0 >= 1 for a pure squeeze",
                format!("A0 = {mean_variance}"),
            ));
        }
        Self::new(mean_variance, (mean_variance * mean_variance - 1.0).sqrt(), phase)
    }

    /// The non-evolving ground-state shape, `A = 1`, `B = 0`.
    pub fn ground() -> Self {
        Self {
            mean_variance: 1.0,
            amplitude: 0.0,
            phase: 0.0,
        }
    }

    pub fn mean_variance(&self) -> f64 {
        self.mean_variance
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// `P = (A0 + ΔA)(A0 − ΔA)`.
    pub fn purity_product(&self) -> f64 {
        (self.mean_variance + self.amplitude) * (self.mean_variance - self.amplitude)
    }

    pub fn max_variance(&self) -> f64 {
        self.mean_variance + self.amplitude
    }

    pub fn min_variance(&self) -> f64 {
        self.mean_variance - self.amplitude
    }

    pub fn is_pure(&self) -> bool {
        (self.purity_product() - 1.0).abs() <= PURITY_PRODUCT_TOLERANCE
    }
}

/// Classical motion of the state center, `x_c = X cos(ωt + φ_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CenterTrajectory {
    amplitude: f64,
    phase: f64,
}

impl CenterTrajectory {
    pub fn new(amplitude: f64, phase: f64) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) || !phase.is_finite() {
            return Err(invariant("X_amp >= 0", format!("X_amp = {amplitude}, phi_c = {phase}")));
        }
        Ok(Self { amplitude, phase })
    }

    /// The trajectory through phase-space point `(x0, p0)` at `t = 0`.
    pub fn through(x0: f64, p0: f64, osc: &OscillatorConfig) -> Self {
        let scaled_p = p0 / (osc.mass() * osc.angular_frequency());
        Self {
            amplitude: x0.hypot(scaled_p),
            phase: (-scaled_p).atan2(x0),
        }
    }

    pub fn at_rest() -> Self {
        Self::default()
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }
}

/// Full description of a Gaussian oscillator state: shape dynamics, center
/// motion and the mixedness `P` (stored, and checked against the squeeze).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianStateSpec {
    pub osc: OscillatorConfig,
    pub squeeze: SqueezeDynamics,
    pub center: CenterTrajectory,
    purity_product: f64,
}

impl GaussianStateSpec {
    pub fn new(osc: OscillatorConfig, squeeze: SqueezeDynamics, center: CenterTrajectory) -> Self {
        Self {
            osc,
            squeeze,
            center,
            purity_product: squeeze.purity_product(),
        }
    }

    /// Builds a spec with an explicitly supplied `P`, which must agree with the squeeze.
    pub fn with_purity_product(
        osc: OscillatorConfig,
        squeeze: SqueezeDynamics,
        center: CenterTrajectory,
        purity_product: f64,
    ) -> Result<Self> {
        let implied = squeeze.purity_product();
        if (purity_product - implied).abs() > PURITY_PRODUCT_TOLERANCE * implied.max(1.0) {
            return Err(invariant(
                "P = (A0 + dA)(A0 - dA)",
                format!("stored P = {purity_product}, squeeze implies {implied}"),
            ));
        }
        Ok(Self {
            osc,
            squeeze,
            center,
            purity_product,
        })
    }

    pub fn purity_product(&self) -> f64 {
        self.purity_product
    }

    pub fn is_pure(&self) -> bool {
        (self.purity_product - 1.0).abs() <= PURITY_PRODUCT_TOLERANCE
    }

    pub(crate) fn require_pure(&self, operation: &str) -> Result<()> {
        if self.is_pure() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{operation} requires a pure state (P = 1), got P = {}",
                self.purity_product
            )))
        }
    }

    /// Largest position standard deviation reached over a period, `σ_gr √(A0 + ΔA)`.
    pub fn max_position_std(&self) -> f64 {
        (self.osc.ground_variance() * self.squeeze.max_variance()).sqrt()
    }
}
