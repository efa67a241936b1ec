use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong inside the solvers.
///
/// Numerical failures (`NoConvergence`, `PrecisionLoss`, `DegenerateDenominator`)
/// are kept apart from input errors so that callers can map them to different
/// exit statuses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at x = {0}")]
    Pole(f64),

    #[error("gamma({0}) overflows f64")]
    Overflow(f64),

    #[error("series did not converge within {n_max} terms (last tail bound {tail:e})")]
    NoConvergence { n_max: usize, tail: f64 },

    #[error("catastrophic cancellation: largest term {max_term:e} vs result {result:e}")]
    PrecisionLoss { max_term: f64, result: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid fractional order: {0}")]
    InvalidOrder(String),

    #[error("invalid sampled function: {0}")]
    InvalidSamples(String),

    #[error("space grid with M = {m} intervals cannot resolve K = {k} modes (need M >= 2K)")]
    GridTooCoarse { m: usize, k: usize },

    #[error("source fails both compatibility profiles: {0}")]
    IncompatibleSource(String),

    #[error("denominator below floor {eps:e} for mode(s) {}", format_modes(.modes))]
    DegenerateDenominator { modes: Vec<(usize, f64)>, eps: f64 },
}

impl Error {
    /// True for failures caused by floating-point limits rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::PrecisionLoss { .. }
                | Error::DegenerateDenominator { .. }
                | Error::Overflow(_)
        )
    }
}

fn format_modes(modes: &[(usize, f64)]) -> String {
    modes
        .iter()
        .map(|(k, v)| format!("k={k} (value {v:e})"))
        .collect::<Vec<_>>()
        .join(", ")
}
