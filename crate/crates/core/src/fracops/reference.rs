//! Independent discretizations used to cross-check [`hilfer_derivative`](super::hilfer_derivative).

use super::{check_derivative_orders, SampledFunction};
use crate::error::Result;
use crate::specfun::{gamma, rgamma};

/// Caputo derivative by the L1 scheme, O(h^(2-α)).
pub fn caputo_l1(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    check_derivative_orders(alpha, 1.0)?;
    let n = f.len();
    let b: Vec<f64> = (0..n)
        .map(|j| ((j + 1) as f64).powf(1.0 - alpha) - (j as f64).powf(1.0 - alpha))
        .collect();
    let scale = f.step().powf(-alpha) / gamma(2.0 - alpha)?;
    let v = f.values();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate().skip(1) {
        let mut s = 0.0;
        for j in 0..i {
            s += b[j] * (v[i - j] - v[i - j - 1]);
        }
        *o = s * scale;
    }
    out[0] = out[1];
    Ok(f.with_values(out, 1))
}

/// Riemann-Liouville derivative from the Caputo one:
/// D_RL f = D_C f + f(0) t^(-α) / Γ(1-α).
pub fn riemann_liouville_l1(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    let caputo = caputo_l1(f, alpha)?;
    let f0 = f.values()[0] * rgamma(1.0 - alpha);
    let mut out = caputo.into_values();
    for (i, o) in out.iter_mut().enumerate().skip(1) {
        *o += f0 * f.t(i).powf(-alpha);
    }
    out[0] = out[1];
    Ok(f.with_values(out, 1))
}
