//! Univariate and bivariate Mittag-Leffler functions.
//!
//! The bivariate (multinomial) function is
//!
//! ```text
//! E_{(a,b),ρ}(x, y) = Σ_{n>=0} Σ_{i=0}^{n} C(n,i) x^i y^(n-i) / Γ(ρ + b n - (b-a) i)
//! ```
//!
//! so that x pairs with the smaller frequency `a` and y with `b`. In the
//! diffusion problem a = α₁ - α₂, b = α₁, x = -μ t^(α₁-α₂), y = -(kπ)² t^α₁.
//!
//! Evaluation strategy:
//!
//! * the double series, summed row by row with Neumaier compensation and the
//!   binomial weights carried by recurrence, stopping once a geometric tail
//!   bound drops below `tol`;
//! * for x, y <= 0, whenever the series would need terms large enough that
//!   rounding alone exceeds `tol`, the branch-cut Laplace inversion in
//!   [`branch_cut`](super::branch_cut) takes over;
//! * otherwise a cancellation guard turns silent garbage into
//!   [`Error::PrecisionLoss`].

use super::branch_cut;
use super::gamma::{gamma, ln_gamma, rgamma, GAMMA_MAX_ARG};
use crate::error::{Error, Result};

/// Parameter triple (a, b, ρ) of E_{(a,b),ρ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    pub a: f64,
    pub b: f64,
    pub rho: f64,
}

impl MLParams {
    pub fn new(a: f64, b: f64, rho: f64) -> Result<Self> {
        let p = MLParams { a, b, rho };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("rho", self.rho)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Σ|term| / |result| up to which a series counts as free of cancellation.
const BENIGN_CANCELLATION: f64 = 4.0;

/// Truncation and safety knobs for the power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Absolute tail tolerance.
    pub tol: f64,
    /// Cap on the outer summation index.
    pub n_max: usize,
    /// Largest tolerated ratio max|term| / |result|.
    pub cancel_guard: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            tol: 1e-12,
            n_max: 500,
            cancel_guard: 1e12,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParams(format!("tol must be positive, got {}", self.tol)));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParams("n_max must be at least 1".into()));
        }
        if !(self.cancel_guard > 1.0) {
            return Err(Error::InvalidParams(format!(
                "cancel_guard must exceed 1, got {}",
                self.cancel_guard
            )));
        }
        Ok(())
    }

    /// Largest Σ|term| for which rounding stays below `tol`.
    fn rounding_budget(&self) -> f64 {
        self.tol / (16.0 * f64::EPSILON)
    }

    /// Where a series with non-positive arguments is abandoned mid-way. Its
    /// value is O(1) there, so a larger Σ|term| is already cancellation.
    fn abort_budget(&self) -> f64 {
        self.rounding_budget().max(BENIGN_CANCELLATION * 16.0)
    }

    /// Whether a finished series is trustworthy: rounding below `tol`, or
    /// Σ|term| within a small factor of the result, which costs only a few
    /// ulps whatever `tol` asks for.
    fn accepts(&self, s: &SeriesSum) -> bool {
        !s.over_budget && s.abs_sum <= self.rounding_budget().max(BENIGN_CANCELLATION * s.value.abs())
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Result of a truncated series together with its magnitude bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct SeriesSum {
    pub value: f64,
    /// Largest |term| seen.
    pub max_term: f64,
    /// Σ |term| over the terms used.
    pub abs_sum: f64,
    /// Outer index reached.
    pub rows: usize,
    /// Set when summation stopped because `abs_sum` passed the caller's budget.
    pub over_budget: bool,
}

impl SeriesSum {
    fn check_cancellation(&self, ctrl: &SeriesControl) -> Result<f64> {
        let ratio = self.max_term / self.value.abs();
        if !self.value.is_finite() || ratio > ctrl.cancel_guard {
            return Err(Error::PrecisionLoss {
                max_term: self.max_term,
                result: self.value,
            });
        }
        Ok(self.value)
    }
}

/// Terms whose numerator stays below e^LN_DIRECT_LIMIT are formed as plain
/// products; larger ones go through logarithms to avoid overflow.
const LN_DIRECT_LIMIT: f64 = 600.0;

/// Signed exp(ln_mag), negative when `negative`.
#[inline]
fn signed_exp(ln_mag: f64, negative: bool) -> f64 {
    let m = ln_mag.exp();
    if negative {
        -m
    } else {
        m
    }
}

/// ln|v|, -inf for zero.
#[inline]
fn ln_abs(v: f64) -> f64 {
    if v == 0.0 {
        f64::NEG_INFINITY
    } else {
        v.abs().ln()
    }
}

/// Outer index from which Γ(ρ + c n) is increasing and log-convex along the
/// series, so row ratios are monotone and the geometric tail bound is safe.
fn monotone_from(rho: f64, c: f64) -> usize {
    let need = 2.0 - rho;
    if need <= 0.0 {
        1
    } else {
        (need / c).ceil() as usize + 1
    }
}

/// Tail bound `row * r / (1 - r)` once rows shrink geometrically.
fn tail_bound(row: f64, prev_row: f64) -> Option<f64> {
    if prev_row <= 0.0 {
        return if row == 0.0 { Some(0.0) } else { None };
    }
    let r = row / prev_row;
    (r < 1.0).then(|| row * r / (1.0 - r))
}

/// Power series of E_{α,ρ}(z).
pub fn ml_univariate_series(alpha: f64, rho: f64, z: f64, ctrl: &SeriesControl, budget: f64) -> Result<SeriesSum> {
    let lz = ln_abs(z);
    let mut acc = CompensatedSum::default();
    let (mut max_term, mut abs_sum) = (0.0_f64, 0.0_f64);
    let mut prev = 0.0;
    let start = monotone_from(rho, alpha);
    let mut tail = f64::INFINITY;

    for n in 0..ctrl.n_max {
        let arg = rho + alpha * n as f64;
        let ln_pow = if n == 0 { 0.0 } else { n as f64 * lz };
        let term = if arg < GAMMA_MAX_ARG && ln_pow < LN_DIRECT_LIMIT {
            z.powi(n as i32) * rgamma(arg)
        } else {
            signed_exp(ln_pow - ln_gamma(arg), z < 0.0 && n % 2 == 1)
        };
        acc.add(term);
        let mag = term.abs();
        max_term = max_term.max(mag);
        abs_sum += mag;
        if abs_sum > budget || !abs_sum.is_finite() {
            return Ok(SeriesSum {
                value: acc.value(),
                max_term,
                abs_sum,
                rows: n + 1,
                over_budget: true,
            });
        }
        if n >= start {
            if let Some(t) = tail_bound(mag, prev) {
                tail = t;
                if t < ctrl.tol {
                    return Ok(SeriesSum {
                        value: acc.value(),
                        max_term,
                        abs_sum,
                        rows: n + 1,
                        over_budget: false,
                    });
                }
            }
        }
        prev = mag;
        if z == 0.0 {
            break;
        }
    }
    if z == 0.0 {
        return Ok(SeriesSum {
            value: acc.value(),
            max_term,
            abs_sum,
            rows: 1,
            over_budget: false,
        });
    }
    Err(Error::NoConvergence {
        n_max: ctrl.n_max,
        tail,
    })
}

/// Double power series of E_{(a,b),ρ}(x, y), summed by rows of constant n.
pub fn ml_bivariate_series(p: &MLParams, x: f64, y: f64, ctrl: &SeriesControl, budget: f64) -> Result<SeriesSum> {
    let (lx, ly) = (ln_abs(x), ln_abs(y));
    let shift = p.b - p.a;
    let mut acc = CompensatedSum::default();
    let (mut max_term, mut abs_sum) = (0.0_f64, 0.0_f64);
    let mut prev_row = 0.0;
    let start = monotone_from(p.rho, p.a.min(p.b));
    let mut tail = f64::INFINITY;

    for n in 0..ctrl.n_max {
        let nf = n as f64;
        let mut row = 0.0;
        // C(n, i) and its log, advanced by the factor (n - i)/(i + 1).
        let mut binom = 1.0;
        let mut ln_binom = 0.0;
        // With one argument zero only the i = 0 or i = n term survives.
        let (i_lo, i_hi) = match (x == 0.0, y == 0.0) {
            (true, true) => (0, 0),
            (true, false) => (0, 0),
            (false, true) => (n, n),
            (false, false) => (0, n),
        };
        for i in i_lo..=i_hi {
            let fi = i as f64;
            let ln_pow = if i == 0 { 0.0 } else { fi * lx } + if i == n { 0.0 } else { (nf - fi) * ly };
            let arg = p.rho + p.b * nf - shift * fi;
            let term = if arg < GAMMA_MAX_ARG && ln_binom + ln_pow < LN_DIRECT_LIMIT {
                binom * x.powi(i as i32) * y.powi((n - i) as i32) * rgamma(arg)
            } else {
                let negative = (x < 0.0 && i % 2 == 1) != (y < 0.0 && (n - i) % 2 == 1);
                signed_exp(ln_binom + ln_pow - ln_gamma(arg), negative)
            };
            acc.add(term);
            let mag = term.abs();
            row += mag;
            max_term = max_term.max(mag);
            if i < n {
                let factor = (nf - fi) / (fi + 1.0);
                binom *= factor;
                ln_binom += factor.ln();
            }
        }
        abs_sum += row;
        if abs_sum > budget || !abs_sum.is_finite() {
            return Ok(SeriesSum {
                value: acc.value(),
                max_term,
                abs_sum,
                rows: n + 1,
                over_budget: true,
            });
        }
        if n >= start {
            if let Some(t) = tail_bound(row, prev_row) {
                tail = t;
                if t < ctrl.tol {
                    return Ok(SeriesSum {
                        value: acc.value(),
                        max_term,
                        abs_sum,
                        rows: n + 1,
                        over_budget: false,
                    });
                }
            }
        }
        prev_row = row;
        if x == 0.0 && y == 0.0 {
            return Ok(SeriesSum {
                value: acc.value(),
                max_term,
                abs_sum,
                rows: 1,
                over_budget: false,
            });
        }
    }
    Err(Error::NoConvergence {
        n_max: ctrl.n_max,
        tail,
    })
}

/// E_{α,ρ}(z) = Σ zⁿ / Γ(ρ + αn).
pub fn ml_univariate(alpha: f64, rho: f64, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    ctrl.validate()?;
    if !(alpha > 0.0 && alpha.is_finite() && rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParams(format!("need alpha > 0 and rho > 0, got ({alpha}, {rho})")));
    }
    if !z.is_finite() {
        return Err(Error::InvalidParams(format!("argument must be finite, got {z}")));
    }
    if z == 0.0 {
        return Ok(rgamma(rho));
    }
    if z < 0.0 && alpha < 1.0 {
        let s = ml_univariate_series(alpha, rho, z, ctrl, ctrl.abort_budget());
        return match s {
            Ok(s) if ctrl.accepts(&s) => Ok(s.value),
            _ => branch_cut::univariate(alpha, rho, z),
        };
    }
    let s = ml_univariate_series(alpha, rho, z, ctrl, f64::INFINITY)?;
    s.check_cancellation(ctrl)
}

/// E_{(a,b),ρ}(x, y).
pub fn ml_bivariate(p: &MLParams, x: f64, y: f64, ctrl: &SeriesControl) -> Result<f64> {
    p.validate()?;
    ctrl.validate()?;
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::InvalidParams(format!("arguments must be finite, got ({x}, {y})")));
    }
    if x == 0.0 && y == 0.0 {
        return Ok(rgamma(p.rho));
    }
    if branch_cut::applicable(p.a, p.b, x, y) {
        let s = ml_bivariate_series(p, x, y, ctrl, ctrl.abort_budget());
        return match s {
            Ok(s) if ctrl.accepts(&s) => Ok(s.value),
            _ => branch_cut::bivariate(p.a, p.b, p.rho, x, y),
        };
    }
    let s = ml_bivariate_series(p, x, y, ctrl, f64::INFINITY)?;
    s.check_cancellation(ctrl)
}

/// Branch-cut evaluation only, for x, y <= 0 and a, b < 1.
///
/// Exposed so that tests can compare the two routes where both apply.
pub fn ml_bivariate_branch_cut(p: &MLParams, x: f64, y: f64) -> Result<f64> {
    p.validate()?;
    if x == 0.0 && y == 0.0 {
        return Ok(rgamma(p.rho));
    }
    if !branch_cut::applicable(p.a, p.b, x, y) {
        return Err(Error::InvalidParams(format!(
            "branch-cut route needs x, y <= 0 and a, b < 1; got x={x}, y={y}, a={}, b={}",
            p.a, p.b
        )));
    }
    branch_cut::bivariate(p.a, p.b, p.rho, x, y)
}

/// Outcome of [`check_gamma_monotonicity`].
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub holds: bool,
    /// First (n, k) in scan order with Γ(ρ + n a + k (b-a)) <= Γ(ρ + n a).
    pub first_violation: Option<(usize, usize)>,
    pub pairs_checked: usize,
}

/// Checks Γ(ρ + n a + k (b - a)) > Γ(ρ + n a) for 1 <= k <= n <= n_max.
///
/// In the (α-β, α) naming of the frequencies this is α - β = a and β = b - a.
/// k = 0 is skipped since the inequality degenerates to equality there.
pub fn check_gamma_monotonicity(p: &MLParams, n_max: usize) -> Result<MonotonicityReport> {
    p.validate()?;
    let step = p.b - p.a;
    let mut pairs_checked = 0;
    for n in 1..=n_max {
        let base = p.rho + n as f64 * p.a;
        for k in 1..=n {
            let arg = base + k as f64 * step;
            pairs_checked += 1;
            let greater = if arg.max(base) < GAMMA_MAX_ARG {
                gamma(arg)? > gamma(base)?
            } else {
                ln_gamma(arg) > ln_gamma(base)
            };
            if !greater {
                return Ok(MonotonicityReport {
                    holds: false,
                    first_violation: Some((n, k)),
                    pairs_checked,
                });
            }
        }
    }
    Ok(MonotonicityReport {
        holds: true,
        first_violation: None,
        pairs_checked,
    })
}
