//! Solution fields u(t, x) = Σ U_k(t) sin(kπx) and their verification.

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fracops::{hilfer_derivative, initial_limit, Limit, SampledFunction};
use crate::grid::{SpaceGrid, TimeGrid};
use crate::orders::FractionalOrders;
use crate::spectral::grid_sine;

/// Fraction of the time grid treated as a start-up layer by the residual.
pub const BOUNDARY_LAYER: f64 = 0.02;

/// One mode's trajectory, or the numerical failure that prevented it.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub k: usize,
    pub trajectory: Option<SampledFunction>,
    pub issue: Option<Error>,
}

impl ModeSolution {
    pub fn is_reliable(&self) -> bool {
        self.issue.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub time: TimeGrid,
    pub space: SpaceGrid,
    /// u[[i, j]] = u(t_i, x_j).
    pub u: Array2<f64>,
    /// Indexed by k - 1.
    pub modes: Vec<ModeSolution>,
}

impl SolutionField {
    /// Sums the reliable mode trajectories on the tensor grid.
    pub fn assemble(time: TimeGrid, space: SpaceGrid, modes: Vec<ModeSolution>) -> Self {
        let m = space.intervals;
        let nx = space.len();
        let active: Vec<(usize, &[f64])> = modes
            .iter()
            .filter_map(|s| s.trajectory.as_ref().map(|tr| (s.k, tr.values())))
            .collect();
        let sines: Vec<Vec<f64>> = active
            .iter()
            .map(|&(k, _)| (0..nx).map(|j| grid_sine(k, j, m)).collect())
            .collect();
        let mut data = vec![0.0; time.len() * nx];
        data.par_chunks_mut(nx).enumerate().for_each(|(i, row)| {
            for ((_, traj), sine) in active.iter().zip(&sines) {
                let c = traj[i];
                for j in 1..m {
                    row[j] += c * sine[j];
                }
            }
        });
        let u = Array2::from_shape_vec((time.len(), nx), data).expect("shape matches data length");
        SolutionField { time, space, u, modes }
    }

    /// u(T, x_j).
    pub fn final_profile(&self) -> Vec<f64> {
        self.u.row(self.time.intervals).to_vec()
    }

    pub fn unreliable_modes(&self) -> Vec<usize> {
        self.modes.iter().filter(|m| !m.is_reliable()).map(|m| m.k).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().all(|v| v.is_finite())
    }
}

/// PDE residual D^{α₁,β₁}u + μD^{α₂,β₂}u - u_xx - g over interior points.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    /// max |r| / max |g| over the checked points.
    pub max_rel: f64,
    /// RMS of r over RMS of g on the checked points.
    pub l2_rel: f64,
    /// max |g| on the checked points.
    pub scale: f64,
    /// Time rows excluded as the start-up layer.
    pub skipped_rows: usize,
}

/// Extrapolated lim_{t->0} I^{(1-β)(1-α)} U_k(t) for both derivative terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeLimits {
    pub k: usize,
    pub first: Limit,
    pub second: Limit,
}

impl ModeLimits {
    pub fn max_abs(&self) -> f64 {
        self.first.value.abs().max(self.second.value.abs())
    }
}

/// Residual of the field against the source samples `g` (same shape as u),
/// with time derivatives from the Hilfer oracle applied to each x column and
/// u_xx from centered differences.
pub fn pde_residual(field: &SolutionField, orders: &FractionalOrders, g: &Array2<f64>) -> Result<Residual> {
    let (nt, nx) = field.u.dim();
    if g.dim() != (nt, nx) {
        return Err(Error::InvalidSamples(format!(
            "source samples have shape {:?}, field has {:?}",
            g.dim(),
            (nt, nx)
        )));
    }
    let t_end = field.time.t_end;
    let hx = field.space.step();
    let skip = ((BOUNDARY_LAYER * (nt - 1) as f64).ceil() as usize).max(1);

    let columns: Vec<Vec<f64>> = (1..nx - 1)
        .into_par_iter()
        .map(|j| -> Result<Vec<f64>> {
            let col = SampledFunction::uniform(t_end, field.u.column(j).to_vec())?;
            let d1 = hilfer_derivative(&col, orders.alpha1, orders.beta1)?;
            let d2 = hilfer_derivative(&col, orders.alpha2, orders.beta2)?;
            Ok((skip..nt)
                .map(|i| {
                    let uxx = (field.u[[i, j + 1]] - 2.0 * field.u[[i, j]] + field.u[[i, j - 1]]) / (hx * hx);
                    d1.values()[i] + orders.mu * d2.values()[i] - uxx - g[[i, j]]
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut max_r = 0.0f64;
    let mut sum_r = 0.0;
    let mut max_g = 0.0f64;
    let mut sum_g = 0.0;
    for (c, col) in columns.iter().enumerate() {
        for (o, r) in col.iter().enumerate() {
            let gv = g[[skip + o, c + 1]];
            max_r = max_r.max(r.abs());
            sum_r += r * r;
            max_g = max_g.max(gv.abs());
            sum_g += gv * gv;
        }
    }
    let (max_rel, l2_rel) = if max_g > 0.0 {
        (max_r / max_g, (sum_r / sum_g).sqrt())
    } else {
        // Homogeneous problem: report absolute values.
        let count = (columns.len() * (nt - skip)).max(1) as f64;
        (max_r, (sum_r / count).sqrt())
    };
    Ok(Residual {
        max_rel,
        l2_rel,
        scale: max_g,
        skipped_rows: skip,
    })
}

/// Number of intervals of the window on which initial limits are extrapolated.
pub const LIMIT_INTERVALS: usize = 1024;

/// Right end of the initial-limit window for mode k: T/1024, shrunk to well
/// below the relaxation times λ_k^(-1/α₁) and μ^(-1/(α₁-α₂)) so that the
/// samples see the start-up behaviour rather than the plateau.
pub fn limit_window(k: usize, orders: &FractionalOrders) -> f64 {
    let lambda = (k as f64 * std::f64::consts::PI).powi(2);
    let mut tau = orders.t_end / 1024.0;
    tau = tau.min(lambda.powf(-1.0 / orders.alpha1) / 256.0);
    if orders.mu > 0.0 {
        tau = tau.min(orders.mu.powf(-1.0 / (orders.alpha1 - orders.alpha2)) / 256.0);
    }
    tau
}

/// Initial limits of one mode from its samples on [0, limit_window(k)].
pub fn mode_limits(k: usize, orders: &FractionalOrders, window: &SampledFunction) -> Result<ModeLimits> {
    Ok(ModeLimits {
        k,
        first: initial_limit(window, orders.alpha1, orders.beta1)?,
        second: initial_limit(window, orders.alpha2, orders.beta2)?,
    })
}
