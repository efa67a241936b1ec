use std::fmt;

use super::squared_norm;

/// Relative tolerance of the boundary conditions.
const BOUNDARY_TOL: f64 = 1e-8;

/// Which smoothness class the data must belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Observation φ: C² with φ''' ∈ L₂; φ and φ'' vanish at both ends.
    Inverse,
    /// Source ḡ(t,·): C² with third derivative in L₂; ḡ and ḡ'' vanish at both ends.
    DirectStrong,
    /// Source ḡ(t,·): C¹ with second derivative in L₂; ḡ vanishes at both ends.
    DirectWeak,
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Inverse => "inverse",
            Profile::DirectStrong => "direct_strong",
            Profile::DirectWeak => "direct_weak",
        }
    }
}

/// A function and its first three derivatives on a uniform grid of [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSamples {
    pub value: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d3: Vec<f64>,
}

impl ProfileSamples {
    pub fn from_fn(intervals: usize, f: impl Fn(f64, usize) -> f64) -> Self {
        let col = |order| {
            (0..=intervals)
                .map(|j| f(j as f64 / intervals as f64, order))
                .collect::<Vec<_>>()
        };
        ProfileSamples {
            value: col(0),
            d1: col(1),
            d2: col(2),
            d3: col(3),
        }
    }

    /// Derivatives by 9-point finite differences, one-sided near the ends.
    pub fn from_values(value: Vec<f64>) -> Self {
        let h = 1.0 / (value.len() - 1) as f64;
        ProfileSamples {
            d1: finite_difference(&value, h, 1),
            d2: finite_difference(&value, h, 2),
            d3: finite_difference(&value, h, 3),
            value,
        }
    }

    fn derivative(&self, order: usize) -> &[f64] {
        match order {
            0 => &self.value,
            1 => &self.d1,
            2 => &self.d2,
            _ => &self.d3,
        }
    }

    fn step(&self) -> f64 {
        1.0 / (self.value.len() - 1) as f64
    }
}

const STENCIL: usize = 9;

/// Weights of the `order`-th derivative at offset `at` from the nodes 0..n
/// (unit spacing), by Fornberg's recursion.
fn fd_weights(at: f64, n: usize, order: usize) -> Vec<f64> {
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = -at;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = i as f64 - at;
        for j in 0..i {
            let c3 = i as f64 - j as f64;
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

fn finite_difference(v: &[f64], h: f64, order: usize) -> Vec<f64> {
    let n = v.len();
    let width = STENCIL.min(n);
    let scale = h.powi(order as i32);
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let w = fd_weights((i - start) as f64, width, order);
            w.iter().zip(&v[start..start + width]).map(|(w, f)| w * f).sum::<f64>() / scale
        })
        .collect()
}

/// Outcome of one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityReport {
    pub profile: Profile,
    pub checks: Vec<ConditionCheck>,
}

impl CompatibilityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Condition-wise worst case over several reports for the same profile,
    /// e.g. one per time level of a time-dependent source.
    pub fn worst_of(reports: &[CompatibilityReport]) -> Option<CompatibilityReport> {
        let mut it = reports.iter();
        let mut acc = it.next()?.clone();
        for r in it {
            for (a, c) in acc.checks.iter_mut().zip(&r.checks) {
                let worse = (!c.passed && a.passed) || (c.passed == a.passed && c.measured > a.measured);
                if worse {
                    *a = c.clone();
                }
            }
        }
        Some(acc)
    }
}

impl fmt::Display for CompatibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "profile {}: {}",
            self.profile.name(),
            if self.passed() { "pass" } else { "FAIL" }
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "  {:<28} {:<4} measured {:.3e} tolerance {:.3e}",
                c.name,
                if c.passed { "ok" } else { "FAIL" },
                c.measured,
                c.tolerance
            )?;
        }
        Ok(())
    }
}

const PRIMES: [&str; 4] = ["", "'", "''", "'''"];

fn boundary(s: &ProfileSamples, order: usize) -> [ConditionCheck; 2] {
    let d = s.derivative(order);
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = BOUNDARY_TOL * (1.0 + scale);
    let mk = |at: &str, v: f64| ConditionCheck {
        name: format!("f{}({at}) = 0", PRIMES[order]),
        passed: v.abs() <= tol,
        measured: v.abs(),
        tolerance: tol,
    };
    [mk("0", d[0]), mk("1", d[d.len() - 1])]
}

/// Samples finite, and no cell jump larger than the next derivative allows:
/// |f(x+h) - f(x)| <= 2h max(|f'(x)|, |f'(x+h)|) plus the boundary tolerance.
fn continuity(s: &ProfileSamples, order: usize) -> ConditionCheck {
    let d = s.derivative(order);
    let next = s.derivative(order + 1);
    let h = s.step();
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = BOUNDARY_TOL * (1.0 + scale);
    let finite = d.iter().chain(next).all(|v| v.is_finite());
    let mut excess = 0.0f64;
    for i in 0..d.len() - 1 {
        let jump = (d[i + 1] - d[i]).abs();
        let allowed = 2.0 * h * next[i].abs().max(next[i + 1].abs()) + tol;
        excess = excess.max(jump / allowed);
    }
    ConditionCheck {
        name: format!("f{} continuous", PRIMES[order]),
        passed: finite && excess <= 1.0,
        measured: if finite { excess } else { f64::INFINITY },
        tolerance: 1.0,
    }
}

/// Square-integrability, decidable from samples only as a finite discrete norm.
fn square_integrable(s: &ProfileSamples, order: usize) -> ConditionCheck {
    let norm = squared_norm(s.derivative(order)).sqrt();
    ConditionCheck {
        name: format!("f{} in L2", PRIMES[order]),
        passed: norm.is_finite(),
        measured: norm,
        tolerance: f64::INFINITY,
    }
}

/// Checks the samples against the boundary and smoothness conditions of `profile`.
pub fn check_compatibility(s: &ProfileSamples, profile: Profile) -> CompatibilityReport {
    let mut checks = Vec::new();
    let (smooth_to, l2_order, zero_orders): (usize, usize, &[usize]) = match profile {
        Profile::Inverse | Profile::DirectStrong => (2, 3, &[0, 2]),
        Profile::DirectWeak => (1, 2, &[0]),
    };
    for order in 0..=smooth_to {
        checks.push(continuity(s, order));
    }
    checks.push(square_integrable(s, l2_order));
    for &order in zero_orders {
        checks.extend(boundary(s, order));
    }
    CompatibilityReport { profile, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_reproduce_known_stencils() {
        let w = fd_weights(1.0, 3, 2);
        assert_eq!(w, vec![1.0, -2.0, 1.0]);
        let w = fd_weights(0.0, 3, 1);
        assert_eq!(w, vec![-1.5, 2.0, -0.5]);
    }

    #[test]
    fn derivatives_of_a_sextic_are_exact() {
        let p = |x: f64| x.powi(6) - 0.3 * x.powi(3);
        let v: Vec<f64> = (0..=20).map(|j| p(j as f64 / 20.0)).collect();
        let d3 = finite_difference(&v, 0.05, 3);
        for (j, d) in d3.iter().enumerate() {
            let x = j as f64 / 20.0;
            assert!((d - (120.0 * x.powi(3) - 1.8)).abs() < 1e-8, "x = {x}");
        }
    }
}
