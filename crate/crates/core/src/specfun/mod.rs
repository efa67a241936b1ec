//! Special functions: Γ and the one- and two-variable Mittag-Leffler functions.

mod branch_cut;
mod gamma;
mod mittag_leffler;

pub use gamma::{cos_pi, gamma, ln_gamma, rgamma, sin_pi, GAMMA_MAX_ARG, GAMMA_MIN_ABSCISSA};
pub use mittag_leffler::{
    check_gamma_monotonicity, ml_bivariate, ml_bivariate_branch_cut, ml_bivariate_series, ml_univariate,
    ml_univariate_series, CompensatedSum, MLParams, MonotonicityReport, SeriesControl, SeriesSum,
};
