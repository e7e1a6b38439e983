//! Gamma and beta functions.

use statrs::function::{beta as sb, gamma as sg};

use crate::error::{Error, Result};

/// Γ(x) for real x, including negative non-integers.
pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

/// Γ(x), rejecting the poles at non-positive integers.
///
/// `name` labels the argument in the error.
pub fn gamma_checked(x: f64, name: &str) -> Result<f64> {
    if !x.is_finite() || (x <= 0.0 && (x - x.round()).abs() < 1e-12) {
        return Err(Error::param(
            name,
            format!("Gamma has a pole at {x}"),
        ));
    }
    Ok(gamma(x))
}

/// B(a, b) for a, b > 0.
pub fn beta(a: f64, b: f64) -> f64 {
    (sg::ln_gamma(a) + sg::ln_gamma(b) - sg::ln_gamma(a + b)).exp()
}

/// Unregularised incomplete beta `∫_0^z t^{a−1}(1−t)^{b−1} dt`.
pub fn beta_inc(a: f64, b: f64, z: f64) -> f64 {
    sb::beta_reg(a, b, z.clamp(0.0, 1.0)) * beta(a, b)
}
