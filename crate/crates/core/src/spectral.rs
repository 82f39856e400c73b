//! FFT-based derivatives on a uniform grid, treating the box as periodic.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::GridSpec;

/// Planned forward/inverse transforms and the angular wavenumbers of a grid.
///
/// The periodic length is `n·h`, so a function that vanishes at both ends of
/// the grid is differentiated to spectral accuracy.
pub struct SpectralOps {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl SpectralOps {
    pub fn new(grid: &GridSpec) -> Self {
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers: wavenumbers(n, grid.spacing()),
        }
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn len(&self) -> usize {
        self.wavenumbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavenumbers.is_empty()
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Inverse transform including the `1/n` normalization.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
    }

    /// `d/dx` of `f`. The Nyquist mode of an even-length grid is dropped.
    pub fn first_derivative(&self, f: &[Complex64]) -> Vec<Complex64> {
        let n = f.len();
        let mut buf = f.to_vec();
        self.forward(&mut buf);
        for (j, (z, &k)) in buf.iter_mut().zip(&self.wavenumbers).enumerate() {
            *z = if n.is_multiple_of(2) && j == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k) * *z
            };
        }
        self.inverse(&mut buf);
        buf
    }

    /// `d²/dx²` of `f`.
    pub fn second_derivative(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut buf = f.to_vec();
        self.forward(&mut buf);
        for (z, &k) in buf.iter_mut().zip(&self.wavenumbers) {
            *z *= -k * k;
        }
        self.inverse(&mut buf);
        buf
    }
}

fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let length = n as f64 * h;
    (0..n)
        .map(|j| {
            let m = if j <= (n - 1) / 2 { j as f64 } else { j as f64 - n as f64 };
            TAU * m / length
        })
        .collect()
}
