//! Quick end-to-end smoke checks that need no config file.

use fracsolve_core::direct::{solve_direct, step_response, DirectProblemSpec, Source};
use fracsolve_core::fracops::{rl_integral, SampledFunction};
use fracsolve_core::functions::SpaceFunction;
use fracsolve_core::inverse::{solve_inverse, InverseProblemSpec};
use fracsolve_core::specfun::{check_gamma_monotonicity, gamma, ml_bivariate, ml_univariate, MLParams, SeriesControl};
use fracsolve_core::FractionalOrders;

pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }
}

type CheckResult = fracsolve_core::Result<Check>;

fn origin_value() -> CheckResult {
    let p = MLParams::new(0.3, 0.7, 1.7)?;
    let v = ml_bivariate(&p, 0.0, 0.0, &SeriesControl::default())?;
    Ok(Check {
        name: "E(0, 0) = 1/Gamma(rho)",
        measured: (v - 1.0 / gamma(1.7)?).abs(),
        tolerance: 1e-15,
    })
}

fn axis_reduction() -> CheckResult {
    let p = MLParams::new(0.4, 0.8, 1.8)?;
    let c = SeriesControl::default();
    let mut worst = 0.0f64;
    for y in [-20.0, -5.0, -0.5, 0.5, 3.0] {
        let b = ml_bivariate(&p, 0.0, y, &c)?;
        let u = ml_univariate(p.b, p.rho, y, &c)?;
        worst = worst.max((b - u).abs() / u.abs().max(1.0));
        let b = ml_bivariate(&p, y, 0.0, &c)?;
        let u = ml_univariate(p.a, p.rho, y, &c)?;
        worst = worst.max((b - u).abs() / u.abs().max(1.0));
    }
    Ok(Check {
        name: "axis reductions",
        measured: worst,
        tolerance: 1e-10,
    })
}

fn monotonicity_violation() -> CheckResult {
    let r = check_gamma_monotonicity(&MLParams::new(0.3, 0.7, 0.2)?, 50)?;
    Ok(Check {
        name: "Gamma monotonicity flags rho = 0.2",
        measured: if r.first_violation == Some((1, 1)) { 0.0 } else { 1.0 },
        tolerance: 0.0,
    })
}

fn power_rule() -> CheckResult {
    let f = SampledFunction::from_fn(1.0, 2000, |t| t)?;
    let i = rl_integral(&f, 0.5)?;
    let exact = |t: f64| t.powf(1.5) / gamma(2.5).unwrap_or(f64::NAN);
    let worst = i
        .times()
        .iter()
        .zip(i.values())
        .fold(0.0f64, |m, (&t, v)| m.max((v - exact(t)).abs()));
    Ok(Check {
        name: "I^0.5 t against closed form",
        measured: worst / exact(1.0),
        tolerance: 1e-4,
    })
}

fn constant_source_identity() -> CheckResult {
    let orders = FractionalOrders::default();
    let spec = DirectProblemSpec {
        modes: 2,
        time_intervals: 200,
        space_intervals: 32,
        ..DirectProblemSpec::new(orders, Source::stationary(SpaceFunction::sine(1, 1.0)))
    };
    let sol = solve_direct(&spec)?;
    let u1 = sol.field.modes[0].trajectory.as_ref().expect("mode 1 solved");
    let mut worst = 0.0f64;
    for (t, v) in u1.times().into_iter().zip(u1.values()) {
        worst = worst.max((v - step_response(1, &orders, t, &spec.ctrl)?).abs());
    }
    Ok(Check {
        name: "constant source gives the step response",
        measured: worst,
        tolerance: 1e-10,
    })
}

fn final_time_interpolation() -> CheckResult {
    let phi = SpaceFunction::sine(1, 1.0);
    let spec = InverseProblemSpec {
        modes: 4,
        time_intervals: 50,
        ..InverseProblemSpec::from_function(FractionalOrders::default(), &phi, 64)
    };
    let sol = solve_inverse(&spec)?;
    let worst = sol
        .field
        .final_profile()
        .iter()
        .zip(&spec.phi)
        .fold(0.0f64, |m, (u, p)| m.max((u - p).abs()));
    Ok(Check {
        name: "inverse field reproduces phi at T",
        measured: worst,
        tolerance: 1e-9,
    })
}

pub fn run() -> Vec<(&'static str, CheckResult)> {
    let checks: [(&'static str, fn() -> CheckResult); 6] = [
        ("origin", origin_value),
        ("reduction", axis_reduction),
        ("monotonicity", monotonicity_violation),
        ("power rule", power_rule),
        ("direct", constant_source_identity),
        ("inverse", final_time_interpolation),
    ];
    checks.into_iter().map(|(label, f)| (label, f())).collect()
}
