//! Gamma function.
//!
//! Values come from the musl-derived `libm` routines, which are accurate to a
//! few ulp over the whole positive range. This module adds the error contract
//! (poles, overflow) and the reciprocal and trigonometric helpers the series
//! code needs.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest argument with a finite Γ(x).
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

/// Abscissa of the minimum of Γ on the positive axis.
pub const GAMMA_MIN_ABSCISSA: f64 = 1.461_632_144_968_362_3;

/// Γ(x) for real x.
///
/// Fails with [`Error::Pole`] at zero and the negative integers and with
/// [`Error::Overflow`] once the result leaves the f64 range.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::InvalidParams("gamma of NaN".into()));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Pole(x));
    }
    if x > GAMMA_MAX_ARG {
        return Err(Error::Overflow(x));
    }
    let value = libm::tgamma(x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow(x))
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::lgamma(x)
}

/// 1/Γ(x), zero at the poles and underflowing smoothly for large x.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > GAMMA_MAX_ARG {
        return (-ln_gamma(x)).exp();
    }
    // Poles and overflow are excluded above.
    1.0 / gamma(x).unwrap_or(f64::INFINITY)
}

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if x == x.round() {
        return 0.0;
    }
    let r = x - 2.0 * (x / 2.0).floor(); // r in [0, 2)
    (PI * r).sin()
}

/// cos(πx) with exact zeros at the half-integers.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}
