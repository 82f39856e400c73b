use num_complex::Complex64;

use crate::error::Result;
use crate::sample::{DensityMatrixSample, WavefunctionSample};

/// Trapezoid-rule overlap `∫ ψa* ψb dx`.
pub fn overlap(a: &WavefunctionSample, b: &WavefunctionSample) -> Result<Complex64> {
    a.grid().ensure_same(b.grid())?;
    let grid = a.grid();
    Ok(a.values()
        .iter()
        .zip(b.values())
        .enumerate()
        .map(|(i, (za, zb))| grid.weight(i) * za.conj() * zb)
        .sum())
}

/// `|∫ ψa* ψb dx|²`.
pub fn fidelity(a: &WavefunctionSample, b: &WavefunctionSample) -> Result<f64> {
    overlap(a, b).map(|z| z.norm_sqr())
}

/// `Tr ρ² = ∫∫ ρ(x, x') ρ(x', x) dx dx'` by the double trapezoid rule.
pub fn purity(dm: &DensityMatrixSample) -> f64 {
    let grid = dm.grid();
    let rho = dm.values();
    let n = grid.n_points();
    let mut total = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += grid.weight(j) * (rho[[i, j]] * rho[[j, i]]).re;
        }
        total += grid.weight(i) * row;
    }
    total
}
