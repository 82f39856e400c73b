//! Closed-form squeezed-state dynamics in the position representation.
//!
//! A pure Gaussian state of the oscillator is
//!
//! ```text
//! ψ(x,t) = (2π σ_gr² A)^(-1/4) exp[−(x − x_c)² (1 + iB) / (4 σ_gr² A)] exp(i p_c x / ħ) exp(−iφ)
//! ```
//!
//! with `A(t) = A0 + ΔA cos(2ωt + φ_sq)`, `B(t) = ΔA sin(2ωt + φ_sq)`, the
//! center `(x_c, p_c)` on the classical orbit and the accumulated phase `φ(t)`.
//! The residual functions check the closed forms against their defining
//! differential equations by finite differences.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::params::{CenterTrajectory, GaussianStateSpec, OscillatorConfig, SqueezeDynamics};
use crate::sample::{DensityMatrixSample, WavefunctionSample};
use crate::spectral::SpectralOps;

/// Default finite-difference step for the residuals, in units of `1/ω`.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// `1e-6/ω`.
pub fn default_fd_step(osc: &OscillatorConfig) -> f64 {
    DEFAULT_FD_STEP / osc.angular_frequency()
}

/// Dimensionless variance `A` and chirp `B` at time `t`.
pub fn quadrature_shape(sq: &SqueezeDynamics, omega: f64, t: f64) -> (f64, f64) {
    let (s, c) = (2.0 * omega * t + sq.phase()).sin_cos();
    (sq.mean_variance() + sq.amplitude() * c, sq.amplitude() * s)
}

/// Pure squeezing that starts from the real Gaussian `exp(−x²/4D)` at `t = 0`.
///
/// With `a = D/σ_gr²`: `A0 = (a + 1/a)/2`, `ΔA = |a − 1/a|/2`, and `φ_sq = 0` for
/// a wide start (`a ≥ 1`) or `π` for a narrow one, so that `ΔA` is never negative.
pub fn squeeze_from_initial_variance(initial_variance: f64, osc: &OscillatorConfig) -> Result<SqueezeDynamics> {
    if !(initial_variance > 0.0 && initial_variance.is_finite()) {
        return Err(Error::Domain(format!(
            "initial variance D must be positive, got {initial_variance}"
        )));
    }
    let a = initial_variance / osc.ground_variance();
    let mean = 0.5 * (a + 1.0 / a);
    let amplitude = 0.5 * (a - 1.0 / a).abs();
    let phase = if a >= 1.0 { 0.0 } else { PI };
    SqueezeDynamics::new(mean, amplitude, phase)
}

/// Center position and momentum on the classical orbit.
pub fn center_state(center: &CenterTrajectory, osc: &OscillatorConfig, t: f64) -> (f64, f64) {
    let (s, c) = (osc.angular_frequency() * t + center.phase()).sin_cos();
    let x = center.amplitude() * c;
    let p = -osc.mass() * osc.angular_frequency() * center.amplitude() * s;
    (x, p)
}

/// Continuous branch of `atan(c·tan θ)`, equal to it modulo `π`.
///
/// Uses `arg(cos θ + i c sin θ) = θ + arg((cos θ + i c sin θ) e^{−iθ})`; the
/// second argument has positive real part `cos²θ + c sin²θ`, so no branch jumps.
fn unwrapped_atan_tan(c: f64, theta: f64) -> f64 {
    let (s, co) = theta.sin_cos();
    theta + ((c - 1.0) * s * co).atan2(co * co + c * s * s)
}

/// Shape part of the phase, `½ atan[(A0 − ΔA) tan(ωt + φ_sq/2)]` on its continuous
/// branch, anchored so that the value at `t = 0` lies in `(−π/4, π/4]`.
///
/// Only a solution of `φ̇ = ω/2A` when `(A0 + ΔA)(A0 − ΔA) = 1`.
fn shape_phase(sq: &SqueezeDynamics, omega: f64, t: f64) -> f64 {
    let c = sq.min_variance();
    let theta0 = 0.5 * sq.phase();
    let branch = (theta0 / PI - 0.5).ceil();
    0.5 * (unwrapped_atan_tan(c, omega * t + theta0) - branch * PI)
}

/// Center part of the phase, `(mω²/2ħ) ∫₀ᵗ (X² − 2x_c²) dt'`.
fn center_phase(center: &CenterTrajectory, osc: &OscillatorConfig, t: f64) -> f64 {
    let omega = osc.angular_frequency();
    let amp = center.amplitude();
    let phi = center.phase();
    -osc.mass() * omega * amp * amp / (4.0 * osc.hbar())
        * ((2.0 * (omega * t + phi)).sin() - (2.0 * phi).sin())
}

/// Global phase `φ(t)` of a pure squeezed state (the state carries `e^{−iφ}`).
pub fn accumulated_phase(
    sq: &SqueezeDynamics,
    center: &CenterTrajectory,
    osc: &OscillatorConfig,
    t: f64,
) -> Result<f64> {
    if !sq.is_pure() {
        return Err(Error::Domain(format!(
            "the accumulated phase is defined for pure states only, P = {}",
            sq.purity_product()
        )));
    }
    Ok(shape_phase(sq, osc.angular_frequency(), t) + center_phase(center, osc, t))
}

/// Wavefunction values on the grid, without any normalization check.
fn pure_values(spec: &GaussianStateSpec, grid: &GridSpec, t: f64) -> Vec<Complex64> {
    let osc = &spec.osc;
    let (a, b) = quadrature_shape(&spec.squeeze, osc.angular_frequency(), t);
    let (xc, pc) = center_state(&spec.center, osc, t);
    let phi = shape_phase(&spec.squeeze, osc.angular_frequency(), t) + center_phase(&spec.center, osc, t);
    let s = osc.ground_variance() * a;
    let amplitude = (2.0 * PI * s).powf(-0.25);
    let chirp = Complex64::new(1.0, b) / (4.0 * s);
    let hbar = osc.hbar();
    grid.points()
        .into_iter()
        .map(|x| {
            let d = x - xc;
            let exponent = -chirp * d * d + Complex64::new(0.0, pc * x / hbar - phi);
            amplitude * exponent.exp()
        })
        .collect()
}

/// Samples the pure squeezed state `ψ(x, t)` on `grid`.
pub fn eval_pure_wavefunction(spec: &GaussianStateSpec, grid: &GridSpec, t: f64) -> Result<WavefunctionSample> {
    spec.require_pure("eval_pure_wavefunction")?;
    grid.check_covers(spec)?;
    WavefunctionSample::new(*grid, pure_values(spec, grid, t), t)
}

/// Factored Gaussian density matrix with coherence factor `P`:
///
/// ```text
/// ρ = (2πs)^(-1/2) exp[−M²/2s] exp[−P (Δ/2)²/2s] exp[−iB M Δ/2s] exp[i p_c Δ/ħ],
/// M = (x + x')/2 − x_c,  Δ = x − x',  s = σ_gr² A.
/// ```
///
/// `P = 1` is `ψ(x)ψ*(x')` of the pure state.
pub(crate) fn gaussian_density_values(spec: &GaussianStateSpec, grid: &GridSpec, t: f64) -> Array2<Complex64> {
    let osc = &spec.osc;
    let (a, b) = quadrature_shape(&spec.squeeze, osc.angular_frequency(), t);
    let (xc, pc) = center_state(&spec.center, osc, t);
    let s = osc.ground_variance() * a;
    let p = spec.purity_product();
    let norm = 1.0 / (2.0 * PI * s).sqrt();
    let k = pc / osc.hbar();
    let xs = grid.points();
    let n = xs.len();
    Array2::from_shape_fn((n, n), |(i, j)| {
        let mid = 0.5 * (xs[i] + xs[j]) - xc;
        let delta = xs[i] - xs[j];
        let re = -(mid * mid) / (2.0 * s) - p * 0.25 * delta * delta / (2.0 * s);
        let im = -b * mid * delta / (2.0 * s) + k * delta;
        norm * Complex64::new(re, im).exp()
    })
}

/// Samples `ρ(x, x') = ψ(x) ψ*(x')` of a pure state.
pub fn eval_pure_density(spec: &GaussianStateSpec, grid: &GridSpec, t: f64) -> Result<DensityMatrixSample> {
    spec.require_pure("eval_pure_density")?;
    grid.check_covers(spec)?;
    DensityMatrixSample::new(*grid, gaussian_density_values(spec, grid, t), t)
}

/// Normalized finite-difference residuals of the shape and phase equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeResiduals {
    /// `|Ȧ + 2ωB| / ω`
    pub variance_rate: f64,
    /// `|BȦ − AḂ − ω(1 − B² − A²)| / ω`
    pub pure_constraint: f64,
    /// `|φ̇ − ω/2A| / ω`
    pub phase_rate: f64,
}

impl OdeResiduals {
    pub fn max(&self) -> f64 {
        self.variance_rate.max(self.pure_constraint).max(self.phase_rate)
    }
}

/// Central-difference check of `Ȧ = −2ωB`, `BȦ − AḂ = ω(1 − B² − A²)` and `φ̇ = ω/2A`.
///
/// The shape part of the closed-form phase is differentiated even when the
/// parameters are not pure, so a broken constraint shows up in both the
/// second and third residual.
pub fn ode_residuals(sq: &SqueezeDynamics, osc: &OscillatorConfig, t: f64, dt_fd: f64) -> OdeResiduals {
    let omega = osc.angular_frequency();
    let (a, b) = quadrature_shape(sq, omega, t);
    let (a_plus, b_plus) = quadrature_shape(sq, omega, t + dt_fd);
    let (a_minus, b_minus) = quadrature_shape(sq, omega, t - dt_fd);
    let a_dot = (a_plus - a_minus) / (2.0 * dt_fd);
    let b_dot = (b_plus - b_minus) / (2.0 * dt_fd);
    let phi_dot = (shape_phase(sq, omega, t + dt_fd) - shape_phase(sq, omega, t - dt_fd)) / (2.0 * dt_fd);
    OdeResiduals {
        variance_rate: (a_dot + 2.0 * omega * b).abs() / omega,
        pure_constraint: (b * a_dot - a * b_dot - omega * (1.0 - b * b - a * a)).abs() / omega,
        phase_rate: (phi_dot - omega / (2.0 * a)).abs() / omega,
    }
}

/// Relative residual `‖iħ∂ψ/∂t − Hψ‖ / ‖Hψ‖` of the closed-form state at time `t`.
///
/// The time derivative is a central difference with step `dt_fd`; the kinetic
/// term uses spectral differentiation on `grid`.
pub fn schrodinger_residual(spec: &GaussianStateSpec, grid: &GridSpec, t: f64, dt_fd: f64) -> Result<f64> {
    spec.require_pure("schrodinger_residual")?;
    grid.check_covers(spec)?;
    let osc = &spec.osc;
    let hbar = osc.hbar();
    let psi = pure_values(spec, grid, t);
    let psi_plus = pure_values(spec, grid, t + dt_fd);
    let psi_minus = pure_values(spec, grid, t - dt_fd);
    let laplacian = SpectralOps::new(grid).second_derivative(&psi);
    let kinetic = -hbar * hbar / (2.0 * osc.mass());
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..psi.len() {
        let x = grid.point(i);
        let h_psi = kinetic * laplacian[i] + osc.potential(x) * psi[i];
        let lhs = Complex64::new(0.0, hbar) * (psi_plus[i] - psi_minus[i]) / (2.0 * dt_fd);
        let w = grid.weight(i);
        num += w * (lhs - h_psi).norm_sqr();
        den += w * h_psi.norm_sqr();
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn natural() -> OscillatorConfig {
        OscillatorConfig::natural()
    }

    #[test]
    fn ground_state_shape_is_constant() {
        let sq = SqueezeDynamics::ground();
        for t in [0.0, 0.3, 17.0] {
            assert_eq!(quadrature_shape(&sq, 1.0, t), (1.0, 0.0));
        }
    }

    #[test]
    fn shape_at_quarter_period() {
        let sq = SqueezeDynamics::new(1.25, 0.75, 0.0).unwrap();
        let (a, b) = quadrature_shape(&sq, 1.0, 0.0);
        assert_eq!((a, b), (2.0, 0.0));
        let (a, b) = quadrature_shape(&sq, 2.0, PI / 4.0);
        assert!((a - 0.5).abs() < 1e-15 && b.abs() < 1e-15);
    }

    #[test]
    fn squeeze_from_initial_width() {
        let osc = OscillatorConfig::new(1.0, 2.0, 1.0).unwrap();
        let g = osc.ground_variance();
        let sq = squeeze_from_initial_variance(g, &osc).unwrap();
        assert_eq!((sq.mean_variance(), sq.amplitude(), sq.phase()), (1.0, 0.0, 0.0));
        let wide = squeeze_from_initial_variance(2.0 * g, &osc).unwrap();
        assert_eq!((wide.mean_variance(), wide.amplitude(), wide.phase()), (1.25, 0.75, 0.0));
        let narrow = squeeze_from_initial_variance(0.5 * g, &osc).unwrap();
        assert_eq!((narrow.mean_variance(), narrow.amplitude(), narrow.phase()), (1.25, 0.75, PI));
        assert_eq!(quadrature_shape(&narrow, 2.0, 0.0).0, 0.5);
        assert!(matches!(squeeze_from_initial_variance(0.0, &osc), Err(Error::Domain(_))));
        assert!(squeeze_from_initial_variance(-1.0, &osc).is_err());
    }

    #[test]
    fn center_follows_classical_orbit() {
        let osc = OscillatorConfig::new(2.0, 3.0, 1.0).unwrap();
        let rest = CenterTrajectory::at_rest();
        assert_eq!(center_state(&rest, &osc, 1.7), (0.0, -0.0));
        let c = CenterTrajectory::new(1.0, 0.0).unwrap();
        assert_eq!(center_state(&c, &osc, 0.0), (1.0, -0.0));
        let (x, p) = center_state(&c, &osc, PI / 6.0);
        assert!(x.abs() < 1e-15);
        assert!((p + 6.0).abs() < 1e-14);
    }

    #[test]
    fn ground_state_phase_is_half_omega_t() {
        let osc = OscillatorConfig::new(1.0, 1.7, 1.0).unwrap();
        let sq = SqueezeDynamics::ground();
        for t in [0.0, 0.4, 3.0, 25.0] {
            let phi = accumulated_phase(&sq, &CenterTrajectory::at_rest(), &osc, t).unwrap();
            assert!((phi - 0.85 * t).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn phase_gains_quarter_turn_per_half_period() {
        let osc = natural();
        let sq = SqueezeDynamics::new(1.25, 0.75, 0.0).unwrap();
        let rest = CenterTrajectory::at_rest();
        let phi0 = accumulated_phase(&sq, &rest, &osc, 0.0).unwrap();
        let phi1 = accumulated_phase(&sq, &rest, &osc, PI).unwrap();
        assert_eq!(phi0, 0.0);
        assert!((phi1 - phi0 - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn initial_phase_uses_principal_branch() {
        let osc = natural();
        let rest = CenterTrajectory::at_rest();
        for phase in [0.0, 1.0, PI, 4.0, 6.2] {
            let sq = SqueezeDynamics::pure(2.0, phase).unwrap();
            let phi0 = accumulated_phase(&sq, &rest, &osc, 0.0).unwrap();
            let principal = 0.5 * (sq.min_variance() * (0.5 * phase).tan()).atan();
            assert!(phi0 > -PI / 4.0 && phi0 <= PI / 4.0 + 1e-15, "phi_sq = {phase}");
            if phase != PI {
                assert!((phi0 - principal).abs() < 1e-14, "phi_sq = {phase}");
            }
        }
    }

    #[test]
    fn phase_is_continuous_across_tangent_poles() {
        let osc = natural();
        let sq = SqueezeDynamics::pure(3.0, 0.0).unwrap();
        let rest = CenterTrajectory::at_rest();
        let pole = PI / 2.0;
        let before = accumulated_phase(&sq, &rest, &osc, pole - 1e-9).unwrap();
        let at = accumulated_phase(&sq, &rest, &osc, pole).unwrap();
        let after = accumulated_phase(&sq, &rest, &osc, pole + 1e-9).unwrap();
        assert!((at - PI / 4.0).abs() < 1e-12);
        assert!(before < at && at < after && after - before < 1e-7);
    }

    #[test]
    fn mixed_parameters_have_no_phase() {
        let sq = SqueezeDynamics::new(2.0, 0.0, 0.0).unwrap();
        let err = accumulated_phase(&sq, &CenterTrajectory::at_rest(), &natural(), 1.0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn ode_residuals_vanish_for_pure_squeeze_and_fail_for_broken_constraint() {
        let osc = natural();
        let dt = default_fd_step(&osc);
        let ground = ode_residuals(&SqueezeDynamics::ground(), &osc, 0.8, dt);
        assert!(ground.max() < 1e-9, "{ground:?}");
        let sq = SqueezeDynamics::new(1.25, 0.75, 0.4).unwrap();
        let r = ode_residuals(&sq, &osc, 1.1, dt);
        assert!(r.max() <= 1e-6, "{r:?}");
        let broken = SqueezeDynamics::new(2.0, 0.5, 0.0).unwrap();
        let r = ode_residuals(&broken, &osc, 0.37, dt);
        assert!(r.variance_rate <= 1e-6);
        assert!(r.pure_constraint > 0.1, "{r:?}");
    }

    #[test]
    fn wavefunction_requires_pure_spec_and_covering_grid() {
        let osc = natural();
        let mixed = GaussianStateSpec::new(
            osc,
            SqueezeDynamics::new(2.0, 0.0, 0.0).unwrap(),
            CenterTrajectory::at_rest(),
        );
        let grid = GridSpec::for_state(&mixed, 256).unwrap();
        assert!(matches!(eval_pure_wavefunction(&mixed, &grid, 0.0), Err(Error::Domain(_))));
        assert!(matches!(eval_pure_density(&mixed, &grid, 0.0), Err(Error::Domain(_))));
        let pure = GaussianStateSpec::new(osc, SqueezeDynamics::ground(), CenterTrajectory::new(3.0, 0.0).unwrap());
        let narrow = GridSpec::symmetric(5.0, 256).unwrap();
        assert!(matches!(eval_pure_wavefunction(&pure, &narrow, 0.0), Err(Error::Coverage(_))));
    }
}
