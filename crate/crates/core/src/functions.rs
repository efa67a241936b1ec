//! Built-in space and time profiles with analytic derivatives.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::ProfileSamples;

/// A function of x on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceFunction {
    /// amplitude · sin(nπx)
    Sine { n: usize, amplitude: f64 },
    /// Σ c_i xⁱ
    Polynomial { coeffs: Vec<f64> },
    /// Linear interpolation of (x, value) pairs covering [0, 1].
    Tabulated { x: Vec<f64>, values: Vec<f64> },
}

impl SpaceFunction {
    pub fn sine(n: usize, amplitude: f64) -> Self {
        SpaceFunction::Sine { n, amplitude }
    }

    /// x(1 - x)
    pub fn parabola() -> Self {
        Self::with_boundary_factor(&[1.0])
    }

    /// x(1 - x) p(x), which vanishes at both ends for any p.
    pub fn with_boundary_factor(p: &[f64]) -> Self {
        let mut coeffs = vec![0.0; p.len() + 2];
        for (i, &c) in p.iter().enumerate() {
            coeffs[i + 1] += c;
            coeffs[i + 2] -= c;
        }
        SpaceFunction::Polynomial { coeffs }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        SpaceFunction::Polynomial { coeffs }
    }

    pub fn tabulated(x: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if x.len() != values.len() || x.len() < 2 {
            return Err(Error::InvalidSamples(format!(
                "table needs at least 2 rows of equal length, got {} and {}",
                x.len(),
                values.len()
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSamples("table abscissae must be strictly increasing".into()));
        }
        let tol = 1e-12;
        if x[0].abs() > tol || (x[x.len() - 1] - 1.0).abs() > tol {
            return Err(Error::InvalidSamples(format!(
                "table must cover [0, 1], covers [{}, {}]",
                x[0],
                x[x.len() - 1]
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSamples("table contains non-finite values".into()));
        }
        Ok(SpaceFunction::Tabulated { x, values })
    }

    /// Whether derivatives are exact rather than finite differences.
    pub fn is_analytic(&self) -> bool {
        !matches!(self, SpaceFunction::Tabulated { .. })
    }

    /// d^order/dx^order at x. Tabulated functions only support order 0.
    pub fn eval(&self, x: f64, order: usize) -> f64 {
        match self {
            SpaceFunction::Sine { n, amplitude } => {
                let w = *n as f64 * PI;
                let phase = w * x + order as f64 * PI / 2.0;
                let s = if order == 0 { crate::specfun::sin_pi(*n as f64 * x) } else { phase.sin() };
                amplitude * w.powi(order as i32) * s
            }
            SpaceFunction::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(order)
                .rev()
                .fold(0.0, |acc, (i, &c)| {
                    let falling: f64 = (0..order).map(|r| (i - r) as f64).product();
                    acc * x + c * falling
                }),
            SpaceFunction::Tabulated { x: xs, values } => {
                assert_eq!(order, 0, "tabulated functions have no analytic derivatives");
                let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
                let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                values[i - 1] * (1.0 - w) + values[i] * w
            }
        }
    }

    /// Values and derivatives on M + 1 uniform nodes; finite differences for
    /// tabulated data.
    pub fn profile_samples(&self, intervals: usize) -> ProfileSamples {
        if self.is_analytic() {
            ProfileSamples::from_fn(intervals, |x, order| self.eval(x, order))
        } else {
            ProfileSamples::from_values(
                (0..=intervals)
                    .map(|j| self.eval(j as f64 / intervals as f64, 0))
                    .collect(),
            )
        }
    }
}

/// Σ c tᵖ with p >= 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFunction {
    terms: Vec<(f64, f64)>,
}

impl TimeFunction {
    pub fn new(terms: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(&(c, p)) = terms.iter().find(|(c, p)| !(c.is_finite() && p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidParams(format!(
                "time term {c}·t^{p} must have a finite coefficient and a power >= 0"
            )));
        }
        Ok(TimeFunction { terms })
    }

    pub fn constant(c: f64) -> Self {
        TimeFunction { terms: vec![(c, 0.0)] }
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, p)| if p == 0.0 { c } else { c * t.powf(p) })
            .sum()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|&(_, p)| p == 0.0)
    }
}
