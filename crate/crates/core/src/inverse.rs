//! Inverse source problem: recover g(x) in D^{α₁,β₁}u + μD^{α₂,β₂}u = u_xx + g(x)
//! from the final-time observation u(T, x) = φ(x).
//!
//! Mode by mode U_k(t) = g_k Φ_k(t) with Φ_k the unit step response, so
//! g_k = φ_k / Φ_k(T).

use ndarray::Array2;
use rayon::prelude::*;

use crate::direct::{solver_control, step_response};
use crate::error::{Error, Result};
use crate::field::{mode_limits, pde_residual, ModeLimits, ModeSolution, Residual, SolutionField, limit_window, LIMIT_INTERVALS};
use crate::fracops::SampledFunction;
use crate::functions::SpaceFunction;
use crate::grid::{SpaceGrid, TimeGrid};
use crate::orders::FractionalOrders;
use crate::specfun::{gamma, SeriesControl};
use crate::spectral::{analyze, check_compatibility, synthesize, CompatibilityReport, Profile, ProfileSamples, SineSeries};

#[derive(Debug, Clone)]
pub struct InverseProblemSpec {
    pub orders: FractionalOrders,
    /// φ on the uniform space grid, endpoints included.
    pub phi: Vec<f64>,
    /// φ and its derivatives for the compatibility check; finite differences
    /// of `phi` when absent.
    pub phi_derivatives: Option<ProfileSamples>,
    pub modes: usize,
    pub time_intervals: usize,
    /// Denominator floor; [`default_eps_den`] when absent.
    pub eps_den: Option<f64>,
    pub waive_compat: bool,
    pub ctrl: SeriesControl,
}

impl InverseProblemSpec {
    pub fn new(orders: FractionalOrders, phi: Vec<f64>) -> Self {
        InverseProblemSpec {
            orders,
            phi,
            phi_derivatives: None,
            modes: 64,
            time_intervals: 2000,
            eps_den: None,
            waive_compat: false,
            ctrl: solver_control(),
        }
    }

    /// Observation given by a built-in profile, sampled on M intervals with
    /// exact derivatives where available.
    pub fn from_function(orders: FractionalOrders, phi: &SpaceFunction, space_intervals: usize) -> Self {
        let samples = phi.profile_samples(space_intervals);
        let mut spec = Self::new(orders, samples.value.clone());
        if phi.is_analytic() {
            spec.phi_derivatives = Some(samples);
        }
        spec
    }

    pub fn space_grid(&self) -> Result<SpaceGrid> {
        let g = SpaceGrid::new(self.phi.len().saturating_sub(1))?;
        g.check_resolves(self.modes)?;
        Ok(g)
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.orders.t_end, self.time_intervals)
    }

    pub fn eps_den(&self) -> f64 {
        self.eps_den.unwrap_or_else(|| default_eps_den(&self.orders))
    }

    fn validate(&self) -> Result<()> {
        self.orders.validate()?;
        self.ctrl.validate()?;
        self.space_grid()?;
        self.time_grid()?;
        let eps = self.eps_den();
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParams(format!("eps_den must be positive, got {eps}")));
        }
        if let Some(j) = self.phi.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSamples(format!("observation is not finite at index {j}")));
        }
        Ok(())
    }

    pub fn compatibility(&self) -> CompatibilityReport {
        let samples = self
            .phi_derivatives
            .clone()
            .unwrap_or_else(|| ProfileSamples::from_values(self.phi.clone()));
        check_compatibility(&samples, Profile::Inverse)
    }
}

/// 1e-10 times the small-T size T^(α₁)/Γ(α₁+1) of every denominator.
pub fn default_eps_den(orders: &FractionalOrders) -> f64 {
    1e-10 * orders.t_end.powf(orders.alpha1) / gamma(orders.alpha1 + 1.0).unwrap_or(1.0)
}

/// Φ_k(T) = T^(α₁) E_{(α₁-α₂,α₁),α₁+1}(-μT^(α₁-α₂), -(kπ)²T^(α₁)).
pub fn denominator(k: usize, orders: &FractionalOrders, ctrl: &SeriesControl) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParams("mode index starts at 1".into()));
    }
    step_response(k, orders, orders.t_end, ctrl)
}

#[derive(Debug, Clone)]
pub struct InverseSolution {
    pub phi_series: SineSeries,
    pub g_series: SineSeries,
    pub field: SolutionField,
    /// Φ_k(T), indexed by k - 1.
    pub denominators: Vec<f64>,
    pub eps_den: f64,
    pub compatibility: CompatibilityReport,
}

fn denominators(spec: &InverseProblemSpec) -> Result<Vec<f64>> {
    (1..=spec.modes)
        .into_par_iter()
        .map(|k| denominator(k, &spec.orders, &spec.ctrl))
        .collect()
}

fn divide(phi: &SineSeries, dens: &[f64], eps: f64) -> Result<SineSeries> {
    let bad: Vec<(usize, f64)> = dens
        .iter()
        .enumerate()
        .filter(|(_, d)| !(d.abs() >= eps))
        .map(|(i, &d)| (i + 1, d))
        .collect();
    if !bad.is_empty() {
        return Err(Error::DegenerateDenominator { modes: bad, eps });
    }
    SineSeries::new(phi.coeffs().iter().zip(dens).map(|(p, d)| p / d).collect())
}

/// g_k = φ_k / Φ_k(T) for k = 1..=K.
pub fn reconstruct_source(spec: &InverseProblemSpec) -> Result<SineSeries> {
    spec.validate()?;
    check_observation(spec)?;
    let phi = analyze(&spec.phi, spec.modes)?;
    divide(&phi, &denominators(spec)?, spec.eps_den())
}

fn check_observation(spec: &InverseProblemSpec) -> Result<CompatibilityReport> {
    let report = spec.compatibility();
    if !report.passed() && !spec.waive_compat {
        let failed: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
        return Err(Error::IncompatibleSource(format!("observation: {}", failed.join(", "))));
    }
    Ok(report)
}

/// U_k(t) = g_k Φ_k(t) on the time grid, summed into u(t, x).
pub fn reconstruct_field(spec: &InverseProblemSpec, g: &SineSeries) -> Result<SolutionField> {
    spec.validate()?;
    let time = spec.time_grid()?;
    let space = spec.space_grid()?;
    let times = time.points();
    let modes = (1..=g.modes())
        .into_par_iter()
        .map(|k| {
            let gk = g.coeff(k);
            let traj: Result<Vec<f64>> = times
                .iter()
                .map(|&t| Ok(gk * step_response(k, &spec.orders, t, &spec.ctrl)?))
                .collect();
            match traj.and_then(|v| SampledFunction::uniform(time.t_end, v)) {
                Ok(u) => Ok(ModeSolution {
                    k,
                    trajectory: Some(u),
                    issue: None,
                }),
                Err(e) if e.is_numerical() => Ok(ModeSolution {
                    k,
                    trajectory: None,
                    issue: Some(e),
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SolutionField::assemble(time, space, modes))
}

/// Source reconstruction followed by the field.
pub fn solve_inverse(spec: &InverseProblemSpec) -> Result<InverseSolution> {
    spec.validate()?;
    let compatibility = check_observation(spec)?;
    let phi_series = analyze(&spec.phi, spec.modes)?;
    let dens = denominators(spec)?;
    let eps_den = spec.eps_den();
    let g_series = divide(&phi_series, &dens, eps_den)?;
    let field = reconstruct_field(spec, &g_series)?;
    Ok(InverseSolution {
        phi_series,
        g_series,
        field,
        denominators: dens,
        eps_den,
        compatibility,
    })
}

pub struct InverseVerification {
    pub residual: Residual,
    /// max_x |u(T, x) - φ(x)|.
    pub observation_mismatch: f64,
    pub limits: Vec<ModeLimits>,
    /// |Φ_k(T)| / eps_den per mode.
    pub margins: Vec<(usize, f64)>,
}

impl InverseVerification {
    pub fn worst_limit(&self) -> f64 {
        self.limits.iter().fold(0.0, |m, l| m.max(l.max_abs()))
    }
}

pub fn verify_inverse(sol: &InverseSolution, spec: &InverseProblemSpec) -> Result<InverseVerification> {
    let field = &sol.field;
    let g_x = synthesize(&sol.g_series, &field.space);
    let g = Array2::from_shape_fn(field.u.dim(), |(_, j)| g_x[j]);
    let residual = pde_residual(field, &spec.orders, &g)?;

    let observation_mismatch = field
        .final_profile()
        .iter()
        .zip(&spec.phi)
        .fold(0.0f64, |m, (u, p)| m.max((u - p).abs()));

    let limits = field
        .modes
        .par_iter()
        .filter(|m| m.is_reliable())
        .map(|m| {
            let window = TimeGrid::new(limit_window(m.k, &spec.orders), LIMIT_INTERVALS)?;
            let gk = sol.g_series.coeff(m.k);
            let v = window
                .points()
                .iter()
                .map(|&t| Ok(gk * step_response(m.k, &spec.orders, t, &spec.ctrl)?))
                .collect::<Result<Vec<_>>>()?;
            mode_limits(m.k, &spec.orders, &SampledFunction::uniform(window.t_end, v)?)
        })
        .collect::<Result<_>>()?;

    let margins = sol
        .denominators
        .iter()
        .enumerate()
        .map(|(i, d)| (i + 1, d.abs() / sol.eps_den))
        .collect();
    Ok(InverseVerification {
        residual,
        observation_mismatch,
        limits,
        margins,
    })
}
