//! Squeezed and mixed Gaussian states of a 1-D harmonic oscillator in the
//! position representation.
//!
//! * [`analytic`]: closed-form `A(t)`, `B(t)`, `φ(t)`, center motion,
//!   wavefunctions, pure density matrices and differential-equation residuals.
//! * [`oracle`]: independent numerical propagation of the Schrödinger
//!   equation (Cayley/Crank–Nicolson and split-step Fourier) and grid
//!   quadrature measures such as fidelity and purity.
//! * [`ensemble`]: mixed Gaussian density matrices, both in closed form and
//!   as brute-force averages of pure states over Gaussian center spreads.
//!
//! All quantities carry their physical constants through [`OscillatorConfig`],
//! so SI and natural units work the same way.

pub mod analytic;
pub mod ensemble;
pub mod error;
pub mod grid;
pub mod moments;
pub mod oracle;
pub mod params;
pub mod sample;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::GridSpec;
pub use moments::Moments;
pub use params::{CenterTrajectory, GaussianStateSpec, OscillatorConfig, SqueezeDynamics};
pub use sample::{DensityMatrixSample, WavefunctionSample};
