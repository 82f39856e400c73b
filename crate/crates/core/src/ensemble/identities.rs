//! Closed forms of the two Gaussian averages used to mix pure states.

use num_complex::Complex64;

use crate::error::{Error, Result};

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {value}")))
    }
}

/// `∫ exp[−((x+y)² + a(x+y))/2σ1²]/√(2πσ1²) · N(y; 0, σ2²) dy`, in closed form:
///
/// ```text
/// exp[−(x² + ax)/2(σ1² + σ2²)] / √(2π(σ1² + σ2²)) · exp[a²σ2² / 8σ1²(σ1² + σ2²)]
/// ```
pub fn gaussian_identity_shifted(x: f64, a: Complex64, var1: f64, var2: f64) -> Result<Complex64> {
    require_positive("sigma1^2", var1)?;
    require_positive("sigma2^2", var2)?;
    let total = var1 + var2;
    let exponent = -(x * x + a * x) / (2.0 * total) + a * a * var2 / (8.0 * var1 * total);
    Ok(exponent.exp() / (2.0 * std::f64::consts::PI * total).sqrt())
}

/// `∫ e^{a(x+y)} N(y; 0, σ²) dy = e^{ax} e^{a²σ²/2}`.
pub fn gaussian_identity_exponential(x: f64, a: Complex64, var: f64) -> Result<Complex64> {
    require_positive("sigma^2", var)?;
    Ok((a * x + 0.5 * a * a * var).exp())
}
