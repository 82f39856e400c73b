//! First and second moments of position and momentum, by grid quadrature.
//!
//! Momentum operators act through spectral derivatives; the covariance is the
//! symmetrized `σ_xp = ⟨(x − ⟨x⟩)(p − ⟨p⟩) + (p − ⟨p⟩)(x − ⟨x⟩)⟩ / 2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::sample::{DensityMatrixSample, WavefunctionSample};
use crate::spectral::SpectralOps;

/// Inputs further than this from unit norm/trace are rejected.
pub const MOMENT_NORMALIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub cov_xp: f64,
    pub uncertainty_product: f64,
}

impl Moments {
    /// Builds moments from raw expectation values `⟨x⟩, ⟨p⟩, ⟨x²⟩, ⟨p²⟩, Re⟨xp⟩`.
    fn from_expectations(x: f64, p: f64, x2: f64, p2: f64, xp: f64) -> Self {
        let var_x = x2 - x * x;
        let var_p = p2 - p * p;
        Self {
            mean_x: x,
            mean_p: p,
            var_x,
            var_p,
            cov_xp: xp - x * p,
            uncertainty_product: (var_x * var_p).sqrt(),
        }
    }

    /// `√(σ_x² σ_p² − σ_xp²)`, the invariant combination bounded below by `ħ/2`.
    pub fn robertson_schrodinger(&self) -> f64 {
        (self.var_x * self.var_p - self.cov_xp * self.cov_xp).sqrt()
    }
}

fn check_normalized(value: f64, what: &str) -> Result<()> {
    if (value - 1.0).abs() > MOMENT_NORMALIZATION_TOLERANCE {
        return Err(Error::Domain(format!("moments need a normalized input, {what} = {value}")));
    }
    Ok(())
}

impl WavefunctionSample {
    pub fn moments(&self, hbar: f64) -> Result<Moments> {
        check_normalized(self.norm(), "norm")?;
        let grid = self.grid();
        let psi = self.values();
        let dpsi = SpectralOps::new(grid).first_derivative(psi);
        let (mut x1, mut x2, mut p1, mut p2, mut xp) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (i, (z, dz)) in psi.iter().zip(&dpsi).enumerate() {
            let w = grid.weight(i);
            let x = grid.point(i);
            let density = z.norm_sqr();
            // ψ* (−iħ ∂ψ)
            let p_local = (z.conj() * Complex64::new(0.0, -hbar) * dz).re;
            x1 += w * x * density;
            x2 += w * x * x * density;
            p1 += w * p_local;
            p2 += w * hbar * hbar * dz.norm_sqr();
            xp += w * x * p_local;
        }
        Ok(Moments::from_expectations(x1, p1, x2, p2, xp))
    }
}

impl DensityMatrixSample {
    pub fn moments(&self, hbar: f64) -> Result<Moments> {
        check_normalized(self.trace(), "trace")?;
        let grid = self.grid();
        let rho = self.values();
        let ops = SpectralOps::new(grid);
        let n = grid.n_points();
        let (mut x1, mut x2, mut p1, mut p2, mut xp) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for j in 0..n {
            let column: Vec<Complex64> = rho.column(j).to_vec();
            let (d1, d2) = diagonal_derivatives(&ops, grid, &column, j);
            let w = grid.weight(j);
            let x = grid.point(j);
            let density = rho[[j, j]].re;
            // (p ρ)(x, x) = −iħ ∂_x ρ(x, x'), (p² ρ)(x, x) = −ħ² ∂²_x ρ(x, x')
            let p_local = (Complex64::new(0.0, -hbar) * d1).re;
            x1 += w * x * density;
            x2 += w * x * x * density;
            p1 += w * p_local;
            p2 += w * (-hbar * hbar * d2).re;
            xp += w * x * p_local;
        }
        Ok(Moments::from_expectations(x1, p1, x2, p2, xp))
    }
}

/// First and second x-derivatives of one density-matrix column, evaluated at row `j`.
fn diagonal_derivatives(ops: &SpectralOps, grid: &GridSpec, column: &[Complex64], j: usize) -> (Complex64, Complex64) {
    debug_assert_eq!(column.len(), grid.n_points());
    let d1 = ops.first_derivative(column);
    let d2 = ops.second_derivative(column);
    (d1[j], d2[j])
}
