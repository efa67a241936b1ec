//! Mittag-Leffler functions with non-positive arguments via Laplace inversion.
//!
//! For x, y <= 0 the function t^(ρ-1) E_{(a,b),ρ}(x t^a, y t^b) is the inverse
//! Laplace transform of
//!
//! ```text
//! F(s) = s^(b-ρ) / (s^b + μ s^(b-a) + λ),    μ = -x, λ = -y,
//! ```
//!
//! evaluated at t = 1. When b < 1 and μ, λ >= 0 the denominator has no zeros
//! on the principal sheet, so the Bromwich contour collapses onto the
//! negative real axis:
//!
//! ```text
//! E = Res_{s=0} - (1/π) ∫_0^∞ e^(-r) Im F(r e^{iπ}) dr .
//! ```
//!
//! The integrand carries no cancellation, which is exactly where the power
//! series fails. The half-line integral is done with an exp-sinh
//! (double-exponential) trapezoidal rule refined by step halving.

use std::f64::consts::{FRAC_PI_2, PI};

use super::gamma::{cos_pi, rgamma, sin_pi};
use crate::error::{Error, Result};

/// Relative change between successive halvings accepted as converged.
const REL_TOL: f64 = 2e-15;
const MAX_LEVELS: usize = 12;
/// Integrand contributions below this fraction are dropped at the ends.
const END_CUTOFF_LN: f64 = -41.0;
const R_MAX: f64 = 60.0;

/// Largest residue / result ratio accepted in the pole case.
const MAX_RESIDUE_RATIO: f64 = 1e3;

/// Tolerance for recognising ρ = b + 1 (simple pole of F at the origin).
const POLE_TOL: f64 = 1e-12;

/// Denominator s^b + μ s^(b-a) + λ on the upper side of the negative axis.
#[derive(Debug, Clone, Copy)]
struct CutDenominator {
    b: f64,
    /// b - a; unused when mu == 0.
    b_minus_a: f64,
    mu: f64,
    lam: f64,
}

impl CutDenominator {
    fn at(&self, ln_r: f64) -> (f64, f64) {
        let rb = (self.b * ln_r).exp();
        let mut re = rb * cos_pi(self.b) + self.lam;
        let mut im = rb * sin_pi(self.b);
        if self.mu != 0.0 {
            let rba = self.mu * (self.b_minus_a * ln_r).exp();
            re += rba * cos_pi(self.b_minus_a);
            im += rba * sin_pi(self.b_minus_a);
        }
        (re, im)
    }
}

/// -(1/π) ∫_0^∞ e^(-r) Im[s^(b-ρ)/D(s)]_{s = r e^{iπ}} dr, plus the residue at 0.
fn invert(den: CutDenominator, rho: f64) -> Result<f64> {
    let theta = den.b - rho;
    let pole = (rho - (den.b + 1.0)).abs() <= POLE_TOL;
    let (sin_t, cos_t) = if pole { (0.0, -1.0) } else { (sin_pi(theta), cos_pi(theta)) };

    // Leading power of the integrand near r = 0, used to place the left end.
    let small_r_power = if pole || theta == 0.0 {
        let im_power = if den.mu > 0.0 { den.b_minus_a } else { den.b };
        theta + im_power
    } else {
        theta
    };
    let tau_power = (1.0 + small_r_power).max(1e-3);
    debug_assert!(small_r_power > -1.0);
    // The pure-power regime starts well below the scale where s^b or
    // μ s^(b-a) reaches λ; for small λ, μ that scale is far below 1.
    let mut ln_scale = den.lam.ln() / den.b;
    if den.mu > 0.0 {
        ln_scale = ln_scale.min((den.lam / den.mu).ln() / den.b_minus_a);
    }
    let ln_r_lo = (END_CUTOFF_LN / tau_power + ln_scale.min(0.0)).max(-1e5);
    let tau_lo = (ln_r_lo / FRAC_PI_2).asinh();
    let tau_hi = (R_MAX.ln() / FRAC_PI_2).asinh();

    let integrand = |tau: f64| -> f64 {
        let ln_r = FRAC_PI_2 * tau.sinh();
        let r = ln_r.exp();
        let (re, im) = den.at(ln_r);
        let norm = re * re + im * im;
        // r^θ times the Jacobian's r, combined so neither overflows alone.
        let num = ((theta + 1.0) * ln_r).exp() * (sin_t * re - cos_t * im);
        (-r).exp() * num / norm * FRAC_PI_2 * tau.cosh()
    };

    // Below r_lo the integrand is a pure power r^q to working precision, so
    // the missing piece ∫_0^{r_lo} is f(r_lo) r_lo / (1 + q). The cut itself
    // leaves a kink at τ_lo, removed to O(h⁴) by the Euler-Maclaurin term.
    let g_lo = integrand(tau_lo);
    let head = g_lo / (FRAC_PI_2 * tau_lo.cosh()) / (1.0 + small_r_power);
    let dg = |tau: f64| {
        let d = 1e-4 * tau.abs().max(1.0);
        (integrand(tau + d) - integrand(tau - d)) / (2.0 * d)
    };
    let slope_jump = dg(tau_hi) - dg(tau_lo);

    let mut h = (tau_hi - tau_lo) / 16.0;
    let g_hi = integrand(tau_hi);
    let mut sum = 0.5 * (g_lo + g_hi);
    let mut abs_sum = 0.5 * (g_lo.abs() + g_hi.abs());
    for j in 1..16 {
        let g = integrand(tau_lo + j as f64 * h);
        sum += g;
        abs_sum += g.abs();
    }
    let mut estimate = sum * h - h * h / 12.0 * slope_jump;
    let residue = if pole { 1.0 / den.lam } else { 0.0 };
    // With a pole the residue 1/λ and the integral nearly cancel when λ is
    // small; more than a few digits lost is reported.
    let cancelled = |value: f64| residue.abs() > MAX_RESIDUE_RATIO * value.abs();
    let (mut value, mut change, mut converged) = (f64::NAN, f64::NAN, false);

    for level in 0..MAX_LEVELS {
        let n_new = 16usize << level;
        for j in 0..n_new {
            let g = integrand(tau_lo + (2 * j + 1) as f64 * 0.5 * h);
            sum += g;
            abs_sum += g.abs();
        }
        h *= 0.5;
        let refined = sum * h - h * h / 12.0 * slope_jump;
        value = residue - (refined + head) / PI;
        change = (refined - estimate).abs() / PI;
        let noise = 64.0 * f64::EPSILON * abs_sum * h / PI;
        estimate = refined;
        if !value.is_finite() {
            break;
        }
        if level >= 1 && change <= (REL_TOL * value.abs()).max(noise) {
            converged = true;
            break;
        }
    }
    if value.is_finite() && cancelled(value) {
        return Err(Error::PrecisionLoss {
            max_term: residue,
            result: value,
        });
    }
    if converged {
        return Ok(value);
    }
    Err(Error::NoConvergence {
        n_max: 16 << MAX_LEVELS,
        tail: change,
    })
}

/// Whether [`bivariate`] can evaluate E_{(a,b),ρ}(x, y).
pub(crate) fn applicable(a: f64, b: f64, x: f64, y: f64) -> bool {
    x <= 0.0 && y <= 0.0 && (x < 0.0 || y < 0.0) && b < 1.0 && a < 1.0
}

/// E_{α,ρ}(z) for z < 0 and 0 < α < 1.
pub(crate) fn univariate(alpha: f64, rho: f64, z: f64) -> Result<f64> {
    debug_assert!(z < 0.0 && alpha < 1.0);
    if rho > alpha + 1.0 + POLE_TOL {
        // E_{α,ρ}(z) = (E_{α,ρ-α}(z) - 1/Γ(ρ-α)) / z
        let lower = univariate(alpha, rho - alpha, z)?;
        return Ok((lower - rgamma(rho - alpha)) / z);
    }
    invert(
        CutDenominator {
            b: alpha,
            b_minus_a: 0.0,
            mu: 0.0,
            lam: -z,
        },
        rho,
    )
}

/// E_{(a,b),ρ}(x, y) for x, y <= 0 (not both zero) and a, b < 1.
pub(crate) fn bivariate(a: f64, b: f64, rho: f64, x: f64, y: f64) -> Result<f64> {
    debug_assert!(applicable(a, b, x, y));
    if y == 0.0 {
        // Only the i = n terms survive: a univariate function of order a.
        return univariate(a, rho, x);
    }
    if x == 0.0 {
        return univariate(b, rho, y);
    }
    if rho > b + 1.0 + POLE_TOL {
        // From E_σ = 1/Γ(σ) + x E_{σ+a} + y E_{σ+b} with σ = ρ - b.
        let sigma = rho - b;
        let lower = bivariate(a, b, sigma, x, y)?;
        let shifted = bivariate(a, b, sigma + a, x, y)?;
        return Ok((lower - rgamma(sigma) - x * shifted) / y);
    }
    invert(
        CutDenominator {
            b,
            b_minus_a: b - a,
            mu: -x,
            lam: -y,
        },
        rho,
    )
}
