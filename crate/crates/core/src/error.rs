use thiserror::Error;

/// Errors raised by state construction, evaluation and the numerical oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A type invariant was violated at construction time.
    #[error("invariant violated: {invariant} ({detail})")]
    Invariant {
        invariant: &'static str,
        detail: String,
    },

    /// An operation was called outside the domain where it is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The spatial grid does not extend far enough to hold the state.
    #[error("grid does not cover the state: {0}")]
    Coverage(String),

    /// Two samples live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The propagated wavefunction reached the edge of the box.
    #[error("boundary contamination at t = {time}: |psi| = {amplitude:e} at the grid edge exceeds {limit:e}")]
    BoundaryContamination {
        time: f64,
        amplitude: f64,
        limit: f64,
    },

    /// Node doubling changed the quadrature result by more than the tolerance.
    #[error("ensemble quadrature not converged at {nodes} nodes per axis: doubling changed the result by {change:e} (peak-relative), tolerance {tolerance:e}")]
    Convergence {
        nodes: usize,
        change: f64,
        tolerance: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invariant(invariant: &'static str, detail: impl Into<String>) -> Error {
    Error::Invariant {
        invariant,
        detail: detail.into(),
    }
}
