//! Wavefunctions and density matrices sampled on a [`GridSpec`].

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{invariant, Error, Result};
use crate::grid::GridSpec;

/// Tolerance on the trapezoid norm of a wavefunction and trace of a density matrix.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;

/// Elementwise Hermiticity tolerance, relative to the largest matrix element.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Complex wavefunction values `ψ(x_i, t)` on a grid (units length^(-1/2)).
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionSample {
    grid: GridSpec,
    values: Vec<Complex64>,
    time: f64,
}

impl WavefunctionSample {
    /// Wraps samples, requiring one value per node and unit trapezoid norm.
    pub fn new(grid: GridSpec, values: Vec<Complex64>, time: f64) -> Result<Self> {
        let sample = Self::from_parts(grid, values, time)?;
        let norm = sample.norm();
        if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(invariant("trapezoid norm = 1 within 1e-8", format!("norm = {norm}")));
        }
        Ok(sample)
    }

    /// Wraps samples without the normalization check.
    pub fn from_parts(grid: GridSpec, values: Vec<Complex64>, time: f64) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, values, time })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Trapezoid-rule `∫|ψ|² dx`.
    pub fn norm(&self) -> f64 {
        self.grid.integrate(self.values.iter().map(|z| z.norm_sqr()))
    }

    /// The same state with every value multiplied by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|z| z * factor).collect(),
            time: self.time,
        }
    }

    /// `ρ(x, x') = ψ(x) ψ*(x')`.
    pub fn outer_product(&self) -> DensityMatrixSample {
        let n = self.values.len();
        let values = Array2::from_shape_fn((n, n), |(i, j)| self.values[i] * self.values[j].conj());
        DensityMatrixSample {
            grid: self.grid,
            values,
            time: self.time,
        }
    }
}

/// Density matrix `ρ(x_i, x_j, t)` on a grid (units length^(-1)), row index `x`, column index `x'`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrixSample {
    grid: GridSpec,
    values: Array2<Complex64>,
    time: f64,
}

impl DensityMatrixSample {
    /// Wraps a matrix after checking Hermiticity, unit trace and a real non-negative diagonal.
    pub fn new(grid: GridSpec, values: Array2<Complex64>, time: f64) -> Result<Self> {
        let sample = Self::from_parts(grid, values, time)?;
        sample.validate()?;
        Ok(sample)
    }

    pub(crate) fn from_parts(grid: GridSpec, values: Array2<Complex64>, time: f64) -> Result<Self> {
        let n = grid.n_points();
        if values.dim() != (n, n) {
            return Err(Error::GridMismatch(format!(
                "matrix of shape {:?} for a grid of {n} points",
                values.dim()
            )));
        }
        Ok(Self { grid, values, time })
    }

    pub fn validate(&self) -> Result<()> {
        let peak = self.peak();
        let n = self.grid.n_points();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.values[[i, j]] - self.values[[j, i]].conj()).norm());
            }
        }
        if worst > HERMITIAN_TOLERANCE * peak {
            return Err(invariant(
                "Hermitian within 1e-10",
                format!("max |rho(x,x') - rho(x',x)*| = {worst:e}, peak {peak:e}"),
            ));
        }
        for i in 0..n {
            let d = self.values[[i, i]];
            if d.im.abs() > HERMITIAN_TOLERANCE * peak || d.re < -HERMITIAN_TOLERANCE * peak {
                return Err(invariant(
                    "diagonal real and non-negative",
                    format!("rho(x,x) = {d} at x = {}", self.grid.point(i)),
                ));
            }
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(invariant("trapezoid trace = 1 within 1e-8", format!("trace = {trace}")));
        }
        Ok(())
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Largest element magnitude.
    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// Trapezoid-rule `∫ρ(x, x) dx`.
    pub fn trace(&self) -> f64 {
        self.grid.integrate(self.values.diag().iter().map(|z| z.re))
    }

    /// `max |ρ − σ|` divided by the peak of `self`.
    pub fn peak_relative_deviation(&self, other: &DensityMatrixSample) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let worst = self
            .values
            .iter()
            .zip(other.values.iter())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()));
        Ok(worst / self.peak())
    }
}
