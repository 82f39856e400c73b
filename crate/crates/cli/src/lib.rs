//! Scenario runner for squeezed and mixed Gaussian oscillator states.
//!
//! A config document lists scenarios; each one is evaluated in closed form,
//! cross-checked against numerical propagation or ensemble averaging, and
//! written out as CSV time series, density dumps and verification reports.

pub mod config;
pub mod dump;
pub mod error;
pub mod run;

pub use config::{load, parse, Product, Scenario};
pub use error::{CliError, CliResult};
