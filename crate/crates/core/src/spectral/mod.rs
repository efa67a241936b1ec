//! Sine series on (0, 1): coefficients by quadrature, truncated synthesis and
//! the boundary/smoothness checks on the data.

mod compat;

pub use compat::{check_compatibility, CompatibilityReport, ConditionCheck, Profile, ProfileSamples};

use crate::error::{Error, Result};
use crate::grid::SpaceGrid;
use crate::specfun::sin_pi;

/// Coefficients c_1..c_K of Σ c_k sin(kπx).
#[derive(Debug, Clone, PartialEq)]
pub struct SineSeries {
    coeffs: Vec<f64>,
}

impl SineSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParams("a sine series needs at least one coefficient".into()));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidParams(format!("coefficient c_{} is not finite", k + 1)));
        }
        Ok(SineSeries { coeffs })
    }

    /// Truncation order K.
    pub fn modes(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// c_k for 1 <= k <= K.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k - 1]
    }

    pub fn scaled(&self, c: f64) -> SineSeries {
        SineSeries {
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * sin_pi((i + 1) as f64 * x))
            .sum()
    }

    /// Σ c_k², which equals 2∫f² for the full series.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// sin(kπ j/M) with the argument reduced exactly.
pub(crate) fn grid_sine(k: usize, j: usize, m: usize) -> f64 {
    let r = (k * j) % (2 * m);
    sin_pi(r as f64 / m as f64)
}

/// Composite Simpson weights on M intervals of [0, 1]; for odd M the last
/// three intervals use the 3/8 rule.
pub fn quadrature_weights(m: usize) -> Vec<f64> {
    assert!(m >= 2, "quadrature needs at least 2 intervals");
    let h = 1.0 / m as f64;
    let mut w = vec![0.0; m + 1];
    let simpson_end = if m.is_multiple_of(2) { m } else { m - 3 };
    for i in (0..simpson_end).step_by(2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if simpson_end < m {
        let s = simpson_end;
        for (o, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
            w[s + o] += 3.0 * h / 8.0 * c;
        }
    }
    w
}

/// ∫₀¹ f² by the same quadrature as [`analyze`].
pub fn squared_norm(samples: &[f64]) -> f64 {
    let w = quadrature_weights(samples.len() - 1);
    samples.iter().zip(&w).map(|(f, w)| w * f * f).sum()
}

/// First K sine coefficients c_k = 2∫₀¹ f(x) sin(kπx) dx of grid samples.
pub fn analyze(samples: &[f64], modes: usize) -> Result<SineSeries> {
    if samples.len() < 3 {
        return Err(Error::InvalidSamples("need at least 3 space samples".into()));
    }
    if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidSamples(format!("non-finite sample at index {j}")));
    }
    if modes == 0 {
        return Err(Error::InvalidParams("number of modes must be at least 1".into()));
    }
    let m = samples.len() - 1;
    SpaceGrid::new(m)?.check_resolves(modes)?;
    let w = quadrature_weights(m);
    let fw: Vec<f64> = samples.iter().zip(&w).map(|(f, w)| 2.0 * f * w).collect();
    let coeffs = (1..=modes)
        .map(|k| (1..m).map(|j| fw[j] * grid_sine(k, j, m)).sum())
        .collect();
    SineSeries::new(coeffs)
}

/// The single coefficient c_k, computed exactly as [`analyze`] would.
pub fn coefficient(samples: &[f64], k: usize) -> Result<f64> {
    let s = analyze(samples, 1)?;
    if k == 1 {
        return Ok(s.coeff(1));
    }
    let m = samples.len() - 1;
    SpaceGrid::new(m)?.check_resolves(k)?;
    let w = quadrature_weights(m);
    Ok((1..m).map(|j| 2.0 * samples[j] * w[j] * grid_sine(k, j, m)).sum())
}

/// Σ c_k sin(kπx) at the grid nodes; the endpoints are exactly zero.
pub fn synthesize(s: &SineSeries, grid: &SpaceGrid) -> Vec<f64> {
    let m = grid.intervals;
    let mut out = vec![0.0; m + 1];
    for (j, o) in out.iter_mut().enumerate().take(m).skip(1) {
        *o = s
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * grid_sine(i + 1, j, m))
            .sum();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_integrate_cubics_exactly() {
        for m in [2, 3, 7, 10] {
            let w = quadrature_weights(m);
            let s: f64 = (0..=m).map(|j| w[j] * (j as f64 / m as f64).powi(3)).sum();
            assert!((s - 0.25).abs() < 1e-15, "m = {m}");
        }
    }

    #[test]
    fn grid_sine_is_exact_at_nodes() {
        assert_eq!(grid_sine(3, 0, 8), 0.0);
        assert_eq!(grid_sine(4, 2, 8), 0.0);
        assert_eq!(grid_sine(2, 2, 8), 1.0);
    }
}
