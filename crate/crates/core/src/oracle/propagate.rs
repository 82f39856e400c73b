//! Time stepping of `iħ ∂ψ/∂t = −(ħ²/2m) ∂²ψ/∂x² + ½mω²x²ψ` on a grid.
//!
//! Two independent discretizations:
//!
//! * [`Scheme::ImplicitUnitary`]: Cayley form `(1 + iHdt/2ħ) ψ' = (1 − iHdt/2ħ) ψ`
//!   with a fourth-order compact (Numerov) Laplacian and vanishing Dirichlet
//!   boundaries. Multiplying through by the Numerov mass matrix keeps both sides
//!   tridiagonal, so every step is one Thomas solve. Unitary for any `dt`.
//! * [`Scheme::SpectralSplitStep`]: Strang splitting `e^{−iVdt/2ħ} e^{−iTdt/ħ} e^{−iVdt/2ħ}`
//!   with the kinetic factor applied in Fourier space on the periodic box.

use num_complex::Complex64;

use crate::error::{invariant, Error, Result};
use crate::grid::GridSpec;
use crate::params::OscillatorConfig;
use crate::sample::WavefunctionSample;
use crate::spectral::SpectralOps;

/// Largest wavefunction magnitude tolerated at either end of the grid.
pub const EDGE_AMPLITUDE_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    ImplicitUnitary,
    SpectralSplitStep,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ImplicitUnitary => "implicit-unitary",
            Scheme::SpectralSplitStep => "spectral-split-step",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "implicit-unitary" => Ok(Scheme::ImplicitUnitary),
            "spectral-split-step" => Ok(Scheme::SpectralSplitStep),
            other => Err(Error::Domain(format!(
                "unknown propagation scheme {other:?}, expected implicit-unitary or spectral-split-step"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub n_steps: usize,
}

impl PropagatorConfig {
    pub fn new(scheme: Scheme, dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invariant("dt > 0", format!("dt = {dt}")));
        }
        if n_steps == 0 {
            return Err(invariant("n_steps >= 1", "n_steps = 0"));
        }
        Ok(Self { scheme, dt, n_steps })
    }

    /// `n_steps` equal steps covering `duration`.
    pub fn covering(scheme: Scheme, duration: f64, n_steps: usize) -> Result<Self> {
        Self::new(scheme, duration / n_steps as f64, n_steps)
    }
}

/// Propagates `psi0` by `cfg.n_steps` steps of `cfg.dt`.
pub fn propagate(psi0: &WavefunctionSample, osc: &OscillatorConfig, cfg: &PropagatorConfig) -> Result<WavefunctionSample> {
    let mut propagator = Propagator::new(psi0.grid(), osc, cfg.scheme, cfg.dt)?;
    let mut psi = psi0.values().to_vec();
    let t_end = propagator.advance(&mut psi, psi0.time(), cfg.n_steps)?;
    WavefunctionSample::from_parts(*psi0.grid(), psi, t_end)
}

/// A reusable stepper for one grid, oscillator, scheme and step size.
pub struct Propagator {
    grid: GridSpec,
    dt: f64,
    stepper: Stepper,
}

enum Stepper {
    Cayley(CayleyStepper),
    Split(SplitStepper),
}

impl Propagator {
    pub fn new(grid: &GridSpec, osc: &OscillatorConfig, scheme: Scheme, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invariant("dt > 0", format!("dt = {dt}")));
        }
        let stepper = match scheme {
            Scheme::ImplicitUnitary => Stepper::Cayley(CayleyStepper::new(grid, osc, dt)),
            Scheme::SpectralSplitStep => Stepper::Split(SplitStepper::new(grid, osc, dt)),
        };
        Ok(Self {
            grid: *grid,
            dt,
            stepper,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Takes `n_steps` steps starting at time `t0`, returning the final time.
    /// Fails as soon as the wavefunction reaches the grid edge.
    pub fn advance(&mut self, psi: &mut [Complex64], t0: f64, n_steps: usize) -> Result<f64> {
        assert_eq!(psi.len(), self.grid.n_points(), "wavefunction length must match the grid");
        check_edges(psi, t0)?;
        for step in 1..=n_steps {
            match &mut self.stepper {
                Stepper::Cayley(s) => s.step(psi),
                Stepper::Split(s) => s.step(psi),
            }
            check_edges(psi, t0 + step as f64 * self.dt)?;
        }
        Ok(t0 + n_steps as f64 * self.dt)
    }

    /// `⟨ψ|H|ψ⟩` for the Hamiltonian this scheme discretizes, which the scheme conserves.
    pub fn energy(&self, psi: &[Complex64]) -> f64 {
        match &self.stepper {
            Stepper::Cayley(s) => s.energy(psi),
            Stepper::Split(s) => s.energy(psi),
        }
    }
}

fn check_edges(psi: &[Complex64], time: f64) -> Result<()> {
    let edge = psi[0].norm().max(psi[psi.len() - 1].norm());
    if edge > EDGE_AMPLITUDE_LIMIT {
        return Err(Error::BoundaryContamination {
            time,
            amplitude: edge,
            limit: EDGE_AMPLITUDE_LIMIT,
        });
    }
    Ok(())
}

/// Tridiagonal matrix stored by diagonals; `lower[0]` and `upper[n-1]` are unused.
#[derive(Clone)]
struct Tridiagonal {
    lower: Vec<Complex64>,
    diag: Vec<Complex64>,
    upper: Vec<Complex64>,
}

impl Tridiagonal {
    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = x.len();
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.lower[i] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.upper[i] * x[i + 1];
            }
            out[i] = acc;
        }
    }
}

/// LU factors of a tridiagonal matrix for repeated Thomas solves.
struct ThomasFactors {
    lower: Vec<Complex64>,
    inv_pivot: Vec<Complex64>,
    upper_scaled: Vec<Complex64>,
}

impl ThomasFactors {
    fn new(m: &Tridiagonal) -> Self {
        let n = m.diag.len();
        let mut inv_pivot = vec![Complex64::new(0.0, 0.0); n];
        let mut upper_scaled = vec![Complex64::new(0.0, 0.0); n];
        let mut pivot = m.diag[0];
        for i in 0..n {
            if i > 0 {
                pivot = m.diag[i] - m.lower[i] * upper_scaled[i - 1];
            }
            inv_pivot[i] = pivot.inv();
            upper_scaled[i] = m.upper[i] * inv_pivot[i];
        }
        Self {
            lower: m.lower.clone(),
            inv_pivot,
            upper_scaled,
        }
    }

    /// Overwrites `rhs` with the solution.
    fn solve_in_place(&self, rhs: &mut [Complex64]) {
        let n = rhs.len();
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            let next = rhs[i + 1];
            rhs[i] -= self.upper_scaled[i] * next;
        }
    }
}

struct CayleyStepper {
    explicit: Tridiagonal,
    implicit: ThomasFactors,
    mass_matrix: ThomasFactors,
    kinetic_scale: f64,
    potential: Vec<f64>,
    spacing: f64,
    scratch: Vec<Complex64>,
}

impl CayleyStepper {
    fn new(grid: &GridSpec, osc: &OscillatorConfig, dt: f64) -> Self {
        let n = grid.n_points();
        let h = grid.spacing();
        let potential: Vec<f64> = grid.points().into_iter().map(|x| osc.potential(x)).collect();
        // ħ²/(2m h²)
        let c = osc.hbar() * osc.hbar() / (2.0 * osc.mass() * h * h);
        let tau = dt / (2.0 * osc.hbar());
        let zero = Complex64::new(0.0, 0.0);
        let build = |sign: f64| {
            let itau = Complex64::new(0.0, sign * tau);
            let mut m = Tridiagonal {
                lower: vec![zero; n],
                diag: vec![zero; n],
                upper: vec![zero; n],
            };
            for i in 0..n {
                // M + iτK with M = (1, 10, 1)/12 and K = −c δ² + M V
                m.diag[i] = Complex64::new(10.0 / 12.0, 0.0) + itau * (2.0 * c + 10.0 / 12.0 * potential[i]);
                if i > 0 {
                    m.lower[i] = Complex64::new(1.0 / 12.0, 0.0) + itau * (-c + potential[i - 1] / 12.0);
                }
                if i + 1 < n {
                    m.upper[i] = Complex64::new(1.0 / 12.0, 0.0) + itau * (-c + potential[i + 1] / 12.0);
                }
            }
            m
        };
        let mass = Tridiagonal {
            lower: vec![Complex64::new(1.0 / 12.0, 0.0); n],
            diag: vec![Complex64::new(10.0 / 12.0, 0.0); n],
            upper: vec![Complex64::new(1.0 / 12.0, 0.0); n],
        };
        Self {
            explicit: build(-1.0),
            implicit: ThomasFactors::new(&build(1.0)),
            mass_matrix: ThomasFactors::new(&mass),
            kinetic_scale: c,
            potential,
            spacing: h,
            scratch: vec![zero; n],
        }
    }

    fn step(&mut self, psi: &mut [Complex64]) {
        self.explicit.apply(psi, &mut self.scratch);
        self.implicit.solve_in_place(&mut self.scratch);
        psi.copy_from_slice(&self.scratch);
    }

    /// `⟨ψ| −c M⁻¹δ² + V |ψ⟩`, with Dirichlet zeros beyond the grid.
    fn energy(&self, psi: &[Complex64]) -> f64 {
        let n = psi.len();
        let mut lap: Vec<Complex64> = (0..n)
            .map(|i| {
                let left = if i > 0 { psi[i - 1] } else { Complex64::new(0.0, 0.0) };
                let right = if i + 1 < n { psi[i + 1] } else { Complex64::new(0.0, 0.0) };
                left - 2.0 * psi[i] + right
            })
            .collect();
        self.mass_matrix.solve_in_place(&mut lap);
        let mut total = 0.0;
        for i in 0..n {
            let h_psi = -self.kinetic_scale * lap[i] + self.potential[i] * psi[i];
            total += (psi[i].conj() * h_psi).re;
        }
        total * self.spacing
    }
}

struct SplitStepper {
    ops: SpectralOps,
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    kinetic_energy: Vec<f64>,
    potential: Vec<f64>,
    spacing: f64,
}

impl SplitStepper {
    fn new(grid: &GridSpec, osc: &OscillatorConfig, dt: f64) -> Self {
        let ops = SpectralOps::new(grid);
        let hbar = osc.hbar();
        let potential: Vec<f64> = grid.points().into_iter().map(|x| osc.potential(x)).collect();
        let half_potential = potential
            .iter()
            .map(|v| Complex64::from_polar(1.0, -v * dt / (2.0 * hbar)))
            .collect();
        let kinetic_energy: Vec<f64> = ops
            .wavenumbers()
            .iter()
            .map(|k| hbar * hbar * k * k / (2.0 * osc.mass()))
            .collect();
        let kinetic = kinetic_energy
            .iter()
            .map(|e| Complex64::from_polar(1.0, -e * dt / hbar))
            .collect();
        Self {
            ops,
            half_potential,
            kinetic,
            kinetic_energy,
            potential,
            spacing: grid.spacing(),
        }
    }

    fn step(&mut self, psi: &mut [Complex64]) {
        psi.iter_mut().zip(&self.half_potential).for_each(|(z, u)| *z *= u);
        self.ops.forward(psi);
        psi.iter_mut().zip(&self.kinetic).for_each(|(z, u)| *z *= u);
        self.ops.inverse(psi);
        psi.iter_mut().zip(&self.half_potential).for_each(|(z, u)| *z *= u);
    }

    fn energy(&self, psi: &[Complex64]) -> f64 {
        let n = psi.len() as f64;
        let mut spectrum = psi.to_vec();
        self.ops.forward(&mut spectrum);
        // Parseval: Σ|ψ_j|² = Σ|F_k|²/n
        let kinetic: f64 = spectrum
            .iter()
            .zip(&self.kinetic_energy)
            .map(|(f, e)| e * f.norm_sqr())
            .sum::<f64>()
            / n;
        let potential: f64 = psi.iter().zip(&self.potential).map(|(z, v)| v * z.norm_sqr()).sum();
        (kinetic + potential) * self.spacing
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(PropagatorConfig::new(Scheme::ImplicitUnitary, 0.0, 10).is_err());
        assert!(PropagatorConfig::new(Scheme::ImplicitUnitary, 0.1, 0).is_err());
        let c = PropagatorConfig::covering(Scheme::SpectralSplitStep, 2.0, 8).unwrap();
        assert_eq!(c.dt, 0.25);
        assert_eq!("implicit-unitary".parse::<Scheme>().unwrap(), Scheme::ImplicitUnitary);
        assert!("crank".parse::<Scheme>().is_err());
    }

    #[test]
    fn thomas_solver_inverts_apply() {
        let n = 9;
        let m = Tridiagonal {
            lower: (0..n).map(|i| Complex64::new(0.1 * i as f64, -0.2)).collect(),
            diag: (0..n).map(|i| Complex64::new(3.0 + i as f64, 0.5)).collect(),
            upper: (0..n).map(|i| Complex64::new(-0.3, 0.1 * i as f64)).collect(),
        };
        let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        m.apply(&x, &mut b);
        ThomasFactors::new(&m).solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn edge_guard_trips_on_a_wide_state() {
        let grid = GridSpec::symmetric(3.0, 64).unwrap();
        let values: Vec<Complex64> = vec![Complex64::new(1.0 / 6.0_f64.sqrt(), 0.0); 64];
        let wf = WavefunctionSample::from_parts(grid, values, 0.0).unwrap();
        let cfg = PropagatorConfig::new(Scheme::SpectralSplitStep, 0.01, 3).unwrap();
        let err = propagate(&wf, &OscillatorConfig::natural(), &cfg).unwrap_err();
        assert!(matches!(err, Error::BoundaryContamination { .. }), "{err}");
    }
}
