//! Uniform spatial grids and trapezoid-rule quadrature on them.

use crate::error::{invariant, Error, Result};
use crate::params::GaussianStateSpec;

/// Minimum number of grid points.
pub const MIN_POINTS: usize = 16;

/// Standard deviations of margin required by [`GridSpec::check_covers`].
pub const COVERAGE_STD_DEVS: f64 = 8.0;

/// Standard deviations of margin used by [`GridSpec::for_state`]. At this distance
/// the wavefunction amplitude is below `1e-14`, well under the propagators' edge guard.
pub const DEFAULT_MARGIN_STD_DEVS: f64 = 12.0;

/// Uniform grid of `n_points` nodes on `[x_min, x_max]`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(invariant("x_min < x_max", format!("x_min = {x_min}, x_max = {x_max}")));
        }
        if n_points < MIN_POINTS {
            return Err(invariant("n_points >= 16", format!("n_points = {n_points}")));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    /// Symmetric grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    /// Builds a grid for `spec` and checks that it covers the state.
    pub fn covering(x_min: f64, x_max: f64, n_points: usize, spec: &GaussianStateSpec) -> Result<Self> {
        let grid = Self::new(x_min, x_max, n_points)?;
        grid.check_covers(spec)?;
        Ok(grid)
    }

    /// Default symmetric grid for a state: half-width `X_amp + 12 σ_gr √(A0 + ΔA)`.
    pub fn for_state(spec: &GaussianStateSpec, n_points: usize) -> Result<Self> {
        let half_width = spec.center.amplitude() + DEFAULT_MARGIN_STD_DEVS * spec.max_position_std();
        Self::symmetric(half_width, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        if i == 0 || i + 1 == self.n_points {
            0.5 * h
        } else {
            h
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.weight(i)).collect()
    }

    /// Trapezoid rule for samples `f` given on this grid.
    pub fn integrate(&self, f: impl IntoIterator<Item = f64>) -> f64 {
        f.into_iter()
            .enumerate()
            .map(|(i, v)| self.weight(i) * v)
            .sum()
    }

    /// Requires `x_min ≤ −R` and `x_max ≥ R` with `R = X_amp + 8 σ_gr √(A0 + ΔA)`,
    /// the largest excursion of the center plus eight of the widest standard deviations.
    pub fn check_covers(&self, spec: &GaussianStateSpec) -> Result<()> {
        let reach = spec.center.amplitude() + COVERAGE_STD_DEVS * spec.max_position_std();
        if self.x_min > -reach || self.x_max < reach {
            return Err(Error::Coverage(format!(
                "grid [{}, {}] must contain [-{reach}, {reach}] (X_amp + 8 max std. dev.)",
                self.x_min, self.x_max
            )));
        }
        Ok(())
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}
