//! Numerical references that do not rely on the closed forms: wavefunction
//! propagation and quadrature measures on the grid.

mod measures;
mod propagate;

pub use measures::{fidelity, overlap, purity};
pub use propagate::{propagate, Propagator, PropagatorConfig, Scheme, EDGE_AMPLITUDE_LIMIT};
