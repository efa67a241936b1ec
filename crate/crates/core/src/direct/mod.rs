//! Forward problem: u from a given source ḡ(t, x).
//!
//! Each sine mode solves U_k(t) = ∫₀ᵗ K_k(z) ḡ_k(t - z) dz with
//! K_k(z) = z^(α₁-1) E_{(α₁-α₂,α₁),α₁}(-μ z^(α₁-α₂), -(kπ)² z^(α₁)).
//! The antiderivatives of K_k and of its integral are again Mittag-Leffler
//! functions, so with ḡ_k piecewise linear every cell integral is exact.

mod source;

pub use source::Source;

use std::f64::consts::PI;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{mode_limits, pde_residual, ModeLimits, ModeSolution, Residual, SolutionField, limit_window, LIMIT_INTERVALS};
use crate::fracops::SampledFunction;
use crate::grid::{SpaceGrid, TimeGrid};
use crate::orders::FractionalOrders;
use crate::specfun::{check_gamma_monotonicity, ml_bivariate, MLParams, MonotonicityReport, SeriesControl};
use crate::spectral::{CompatibilityReport, Profile};

/// Series control used by the solvers: tighter than the library default
/// because mode values are small for large k.
pub fn solver_control() -> SeriesControl {
    SeriesControl {
        tol: 1e-15,
        ..SeriesControl::default()
    }
}

fn params(orders: &FractionalOrders, rho: f64) -> MLParams {
    let (a, b) = orders.frequencies();
    MLParams { a, b, rho }
}

fn arguments(k: usize, orders: &FractionalOrders, z: f64) -> (f64, f64) {
    let (a, b) = orders.frequencies();
    let lambda = (k as f64 * PI).powi(2);
    (-orders.mu * z.powf(a), -lambda * z.powf(b))
}

/// z^(α₁-1) E_{(α₁-α₂,α₁),α₁}(-μ z^(α₁-α₂), -(kπ)² z^(α₁)) for z > 0.
pub fn kernel(k: usize, orders: &FractionalOrders, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::InvalidParams(format!("kernel needs z > 0, got {z}")));
    }
    let (x, y) = arguments(k, orders, z);
    Ok(z.powf(orders.alpha1 - 1.0) * ml_bivariate(&params(orders, orders.alpha1), x, y, ctrl)?)
}

/// t^(α₁+j-1) E_{(·),α₁+j}(·), the j-fold integral of the kernel from 0 to t
/// (j = 1 or 2).
fn kernel_integral(j: usize, k: usize, orders: &FractionalOrders, t: f64, ctrl: &SeriesControl) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let rho = orders.alpha1 + j as f64;
    let (x, y) = arguments(k, orders, t);
    Ok(t.powf(rho - 1.0) * ml_bivariate(&params(orders, rho), x, y, ctrl)?)
}

/// ∫₀ᵗ kernel(k, z) dz = t^(α₁) E_{(·),α₁+1}(-μ t^(α₁-α₂), -(kπ)² t^(α₁)),
/// the response of mode k to a unit constant source.
pub fn step_response(k: usize, orders: &FractionalOrders, t: f64, ctrl: &SeriesControl) -> Result<f64> {
    kernel_integral(1, k, orders, t, ctrl)
}

/// U_k on the grid of `g_k`, by product integration with exact kernel moments.
pub fn solve_mode(k: usize, orders: &FractionalOrders, g_k: &SampledFunction, ctrl: &SeriesControl) -> Result<SampledFunction> {
    orders.validate()?;
    let h = g_k.step();
    let n = g_k.len() - 1;
    let primitives: Vec<(f64, f64)> = (0..=n)
        .into_par_iter()
        .map(|j| {
            let z = g_k.t(j);
            Ok((
                kernel_integral(1, k, orders, z, ctrl)?,
                kernel_integral(2, k, orders, z, ctrl)?,
            ))
        })
        .collect::<Result<_>>()?;
    // Cell moments ∫ K and ∫ K (z - z_j) / h over [z_j, z_{j+1}].
    let (m0, m1): (Vec<f64>, Vec<f64>) = primitives
        .windows(2)
        .map(|w| {
            let (p1a, p2a) = w[0];
            let (p1b, p2b) = w[1];
            (p1b - p1a, p1b - (p2b - p2a) / h)
        })
        .unzip();
    let g = g_k.values();
    let values = (0..=n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in 0..i {
                let right = g[i - j];
                let left = g[i - j - 1];
                s += right * m0[j] + (left - right) * m1[j];
            }
            s
        })
        .collect();
    SampledFunction::uniform(g_k.t_end(), values)
}

/// Which well-posedness result the source was validated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Source in the strong class: ḡ, ḡ_xx vanish at the ends, ḡ_xxx ∈ L₂.
    Strong,
    /// Weak class plus the Gamma monotonicity condition on the orders.
    Weak,
    /// Neither passed; the caller waived the check.
    Waived,
}

impl Route {
    pub fn describe(&self) -> &'static str {
        match self {
            Route::Strong => "strong source class: g, g_xx vanish at the ends, g_xxx in L2",
            Route::Weak => "weak source class: g vanishes at the ends, g_xx in L2, Gamma monotonicity holds",
            Route::Waived => "compatibility waived by caller",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Compatibility {
    pub route: Route,
    pub strong: CompatibilityReport,
    pub weak: CompatibilityReport,
    pub monotonicity: MonotonicityReport,
}

/// Range of the Gamma monotonicity check.
pub const MONOTONICITY_N_MAX: usize = 50;

#[derive(Clone)]
pub struct DirectProblemSpec {
    pub orders: FractionalOrders,
    pub source: Source,
    pub modes: usize,
    pub time_intervals: usize,
    pub space_intervals: usize,
    pub waive_compat: bool,
    pub ctrl: SeriesControl,
}

impl DirectProblemSpec {
    pub fn new(orders: FractionalOrders, source: Source) -> Self {
        DirectProblemSpec {
            orders,
            source,
            modes: 64,
            time_intervals: 2000,
            space_intervals: 1024,
            waive_compat: false,
            ctrl: solver_control(),
        }
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.orders.t_end, self.time_intervals)
    }

    pub fn space_grid(&self) -> Result<SpaceGrid> {
        let g = SpaceGrid::new(self.space_intervals)?;
        g.check_resolves(self.modes)?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        self.orders.validate()?;
        self.ctrl.validate()?;
        if self.modes == 0 {
            return Err(Error::InvalidParams("number of modes must be at least 1".into()));
        }
        self.time_grid()?;
        self.space_grid()?;
        Ok(())
    }
}

/// Checks the source against both classes and picks the route.
pub fn check_source(spec: &DirectProblemSpec) -> Result<Compatibility> {
    let space = spec.space_grid()?;
    let strong = spec.source.compatibility(&space, spec.orders.t_end, Profile::DirectStrong)?;
    let weak = spec.source.compatibility(&space, spec.orders.t_end, Profile::DirectWeak)?;
    let monotonicity = check_gamma_monotonicity(&params(&spec.orders, spec.orders.alpha1), MONOTONICITY_N_MAX)?;
    let route = if strong.passed() {
        Route::Strong
    } else if weak.passed() && monotonicity.holds {
        Route::Weak
    } else if spec.waive_compat {
        Route::Waived
    } else {
        let mut why: Vec<String> = strong
            .failures()
            .chain(weak.failures())
            .map(|c| c.name.clone())
            .collect();
        if !monotonicity.holds {
            why.push(format!("Gamma monotonicity fails at {:?}", monotonicity.first_violation));
        }
        why.dedup();
        return Err(Error::IncompatibleSource(why.join(", ")));
    };
    Ok(Compatibility {
        route,
        strong,
        weak,
        monotonicity,
    })
}

pub struct DirectSolution {
    pub field: SolutionField,
    pub compatibility: Compatibility,
}

/// Solves all modes in parallel; a numerical failure in one mode is recorded
/// in its diagnostics and the mode is left out of the field.
pub fn solve_direct(spec: &DirectProblemSpec) -> Result<DirectSolution> {
    spec.validate()?;
    let compatibility = check_source(spec)?;
    let time = spec.time_grid()?;
    let space = spec.space_grid()?;
    let coeffs = spec.source.project(&space, spec.modes, &time.points())?;
    let modes = coeffs
        .into_par_iter()
        .enumerate()
        .map(|(i, gk)| {
            let k = i + 1;
            let g_k = SampledFunction::uniform(time.t_end, gk)?;
            Ok(match solve_mode(k, &spec.orders, &g_k, &spec.ctrl) {
                Ok(u) => ModeSolution {
                    k,
                    trajectory: Some(u),
                    issue: None,
                },
                Err(e) if e.is_numerical() => ModeSolution {
                    k,
                    trajectory: None,
                    issue: Some(e),
                },
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DirectSolution {
        field: SolutionField::assemble(time, space, modes),
        compatibility,
    })
}

pub struct DirectVerification {
    pub residual: Residual,
    pub limits: Vec<ModeLimits>,
}

impl DirectVerification {
    pub fn worst_limit(&self) -> f64 {
        self.limits.iter().fold(0.0, |m, l| m.max(l.max_abs()))
    }
}

/// Residual of the equation on the field plus the initial limits of every
/// reliable mode, the latter extrapolated on a fine window near t = 0.
pub fn verify_direct(field: &SolutionField, spec: &DirectProblemSpec) -> Result<DirectVerification> {
    let times = field.time.points();
    let xs = field.space.points();
    let g = Array2::from_shape_fn((times.len(), xs.len()), |(i, j)| spec.source.eval(times[i], xs[j]));
    let residual = pde_residual(field, &spec.orders, &g)?;

    let limits = field
        .modes
        .par_iter()
        .filter(|m| m.is_reliable())
        .map(|m| {
            let window = TimeGrid::new(limit_window(m.k, &spec.orders), LIMIT_INTERVALS)?;
            let g_k = spec.source.project_mode(&field.space, m.k, &window.points())?;
            let u = solve_mode(m.k, &spec.orders, &SampledFunction::uniform(window.t_end, g_k)?, &spec.ctrl)?;
            mode_limits(m.k, &spec.orders, &u)
        })
        .collect::<Result<_>>()?;
    Ok(DirectVerification { residual, limits })
}
