//! Direct, inverse and verify workflows.

use std::path::PathBuf;

use fracsolve_core::direct::{solve_direct, verify_direct, Compatibility, DirectProblemSpec, Source};
use fracsolve_core::field::{ModeLimits, Residual, SolutionField};
use fracsolve_core::inverse::{default_eps_den, denominator, solve_inverse, verify_inverse, InverseProblemSpec, InverseSolution};
use fracsolve_core::spectral::synthesize;
use fracsolve_core::{Error, FractionalOrders};

use crate::config::{FunctionConfig, Mode, RunConfig};
use crate::output::{field_table, number, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Pass thresholds applied by `verify`.
pub const RESIDUAL_TOL: f64 = 1e-2;
pub const LIMIT_TOL: f64 = 1e-6;
pub const SYNTHESIS_TOL: f64 = 1e-9;

/// What a workflow produced: the report, the tables to write on success and
/// the exit status.
pub struct Outcome {
    pub code: i32,
    pub report: Report,
    pub tables: Vec<Table>,
    /// One-line summary for stderr when the run failed.
    pub error: Option<String>,
}

impl Outcome {
    fn new(report: Report) -> Self {
        Outcome {
            code: EXIT_OK,
            report,
            tables: Vec::new(),
            error: None,
        }
    }

    fn fail(mut self, code: i32, message: String) -> Self {
        self.report.section("error");
        self.report.line(&message);
        self.code = code;
        self.error = Some(message);
        self.tables.clear();
        self
    }

    fn core_error(self, context: &str, e: &Error) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_VALIDATION };
        self.fail(code, format!("{context}: {e}"))
    }
}

pub fn out_dir(cfg: Option<&RunConfig>, flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| cfg.and_then(|c| c.out_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("fracsolve-out"))
}

pub fn run(cfg: &RunConfig, command: Mode) -> Outcome {
    let mut report = Report::default();
    header(&mut report, cfg, command);
    let outcome = Outcome::new(report);
    if let Some(m) = cfg.mode {
        let checkable = command == Mode::Verify && matches!(m, Mode::Direct | Mode::Inverse);
        if m != command && !checkable {
            return outcome.fail(
                EXIT_VALIDATION,
                format!("config declares mode = {m:?} but the {command:?} subcommand was run").to_lowercase(),
            );
        }
    }
    if let Err(e) = cfg.check_discretization() {
        return outcome.fail(EXIT_VALIDATION, e.to_string());
    }
    match command {
        Mode::Direct => match &cfg.source {
            Some(src) => direct(cfg, src, outcome, false),
            None => outcome.fail(EXIT_VALIDATION, "the direct problem needs a [source] table".into()),
        },
        Mode::Inverse => match &cfg.observation {
            Some(obs) => inverse(cfg, obs, outcome, false),
            None => outcome.fail(EXIT_VALIDATION, "the inverse problem needs an [observation] table".into()),
        },
        Mode::Verify => {
            // A config declaring one problem verifies only that problem.
            let source = cfg.source.as_ref().filter(|_| cfg.mode != Some(Mode::Inverse));
            let observation = cfg.observation.as_ref().filter(|_| cfg.mode != Some(Mode::Direct));
            if source.is_none() && observation.is_none() {
                return outcome.fail(EXIT_VALIDATION, "verify needs a [source] or [observation] table".into());
            }
            let mut outcome = outcome;
            if let Some(src) = source {
                outcome = direct(cfg, src, outcome, true);
            }
            if outcome.code == EXIT_OK {
                if let Some(obs) = observation {
                    outcome = inverse(cfg, obs, outcome, true);
                }
            }
            outcome
        }
        Mode::Mlf | Mode::Selftest => outcome.fail(EXIT_VALIDATION, format!("{command:?} takes no config").to_lowercase()),
    }
}

fn header(r: &mut Report, cfg: &RunConfig, command: Mode) {
    r.section("run");
    r.kv("command", format!("{command:?}").to_lowercase());
    r.kv("config", cfg.path.display());
    orders(r, &cfg.orders);
    r.kv("modes K", cfg.modes);
    r.kv("time intervals N_t", cfg.time_intervals);
    r.kv("space intervals M", cfg.space_intervals);
    r.kv("threads", rayon::current_num_threads());
}

fn orders(r: &mut Report, o: &FractionalOrders) {
    r.kv("alpha1, alpha2", format!("{}, {}", o.alpha1, o.alpha2));
    r.kv("beta1, beta2", format!("{}, {}", o.beta1, o.beta2));
    r.kv("mu", o.mu);
    r.kv("T", o.t_end);
}

fn direct(cfg: &RunConfig, src: &FunctionConfig, mut out: Outcome, verify_only: bool) -> Outcome {
    out.report.section("direct problem");
    out.report.kv("source", &src.description);
    if !src.space.is_analytic() {
        out.report.line(FD_WARNING);
        eprintln!("warning: {FD_WARNING}");
    }
    let spec = DirectProblemSpec {
        modes: cfg.modes,
        time_intervals: cfg.time_intervals,
        space_intervals: cfg.space_intervals,
        waive_compat: cfg.waive_compat,
        ..DirectProblemSpec::new(cfg.orders, Source::product(src.time.clone(), src.space.clone()))
    };
    let sol = match solve_direct(&spec) {
        Ok(s) => s,
        Err(e) => return out.core_error("direct solve", &e),
    };
    compatibility(&mut out.report, &sol.compatibility);
    mode_flags(&mut out.report, &sol.field, None);
    let bad = sol.field.unreliable_modes();
    if !bad.is_empty() {
        let list: Vec<String> = sol
            .field
            .modes
            .iter()
            .filter_map(|m| m.issue.as_ref().map(|e| format!("k={} ({e})", m.k)))
            .collect();
        return out.fail(EXIT_NUMERICAL, format!("numerical failure in mode(s) {}", list.join("; ")));
    }
    let v = match verify_direct(&sol.field, &spec) {
        Ok(v) => v,
        Err(e) => return out.core_error("direct verification", &e),
    };
    verification(&mut out.report, &v.residual, &v.limits, v.worst_limit());
    if verify_only {
        return thresholds(out, "direct", &v.residual, v.worst_limit(), None);
    }
    match field_table(&sol.field, cfg.precision) {
        Ok(t) => out.tables.push(t),
        Err(e) => return out.fail(1, e.to_string()),
    }
    out
}

fn inverse(cfg: &RunConfig, obs: &FunctionConfig, mut out: Outcome, verify_only: bool) -> Outcome {
    out.report.section("inverse problem");
    out.report.kv("observation", &obs.description);
    if !obs.space.is_analytic() {
        out.report.line(FD_WARNING);
        eprintln!("warning: {FD_WARNING}");
    }
    let spec = InverseProblemSpec {
        modes: cfg.modes,
        time_intervals: cfg.time_intervals,
        eps_den: cfg.eps_den,
        waive_compat: cfg.waive_compat,
        ..InverseProblemSpec::from_function(cfg.orders, &obs.space, cfg.space_intervals)
    };
    let eps = spec.eps_den();
    out.report.kv(
        "eps_den",
        format!("{eps:.3e}{}", if cfg.eps_den.is_none() { " (default)" } else { "" }),
    );
    if cfg.eps_den.is_some() {
        out.report.kv("default eps_den", format!("{:.3e}", default_eps_den(&cfg.orders)));
    }
    out.report.compatibility(&spec.compatibility());
    let sol = match solve_inverse(&spec) {
        Ok(s) => s,
        Err(e) => {
            if matches!(e, Error::DegenerateDenominator { .. }) {
                margins(&mut out.report, &spec);
            }
            return out.core_error("source reconstruction", &e);
        }
    };
    if cfg.waive_compat && !sol.compatibility.passed() {
        out.report.line("observation compatibility waived by caller");
    }
    mode_flags(&mut out.report, &sol.field, Some(&sol));
    let v = match verify_inverse(&sol, &spec) {
        Ok(v) => v,
        Err(e) => return out.core_error("inverse verification", &e),
    };
    verification(&mut out.report, &v.residual, &v.limits, v.worst_limit());
    let synthesis = synthesis_mismatch(&sol);
    out.report.kv("max |u(T,x) - phi(x)|", format!("{:.3e}", v.observation_mismatch));
    out.report.kv("max |u(T,x) - S_K phi(x)|", format!("{synthesis:.3e}"));
    if verify_only {
        return thresholds(out, "inverse", &v.residual, v.worst_limit(), Some(synthesis));
    }
    match inverse_tables(&sol, cfg.precision) {
        Ok(mut t) => out.tables.append(&mut t),
        Err(e) => return out.fail(1, e.to_string()),
    }
    out
}

const FD_WARNING: &str = "tabulated profile: derivatives for the compatibility checks are \
finite-difference estimates of the linearly interpolated table";

/// Distance of u(T, ·) from the truncated sine series of φ, which the
/// reconstruction reproduces exactly.
fn synthesis_mismatch(sol: &InverseSolution) -> f64 {
    let s = synthesize(&sol.phi_series, &sol.field.space);
    sol.field
        .final_profile()
        .iter()
        .zip(&s)
        .fold(0.0f64, |m, (u, p)| m.max((u - p).abs()))
}

/// Denominator margins for a run that stopped before reconstructing g.
fn margins(r: &mut Report, spec: &InverseProblemSpec) {
    r.section("modes");
    r.line(format!("{:>4}  {:>24}  {:>10}  status", "k", "denominator", "margin"));
    let eps = spec.eps_den();
    for k in 1..=spec.modes {
        match denominator(k, &spec.orders, &spec.ctrl) {
            Ok(d) => {
                let status = if d.abs() >= eps { "ok" } else { "DEGENERATE" };
                r.line(format!("{k:>4}  {:>24}  {:>10.3e}  {status}", number(d, 17), d.abs() / eps));
            }
            Err(e) => r.line(format!("{k:>4}  {e}")),
        }
    }
}

fn compatibility(r: &mut Report, c: &Compatibility) {
    r.section("compatibility");
    r.compatibility(&c.strong);
    r.compatibility(&c.weak);
    let m = &c.monotonicity;
    r.line(match m.first_violation {
        None => format!("Gamma monotonicity, 1 <= k <= n <= 50: holds ({} pairs)", m.pairs_checked),
        Some((n, k)) => format!("Gamma monotonicity, 1 <= k <= n <= 50: fails first at n = {n}, k = {k}"),
    });
    r.kv("route", c.route.describe());
}

fn mode_flags(r: &mut Report, field: &SolutionField, inv: Option<&InverseSolution>) {
    r.section("modes");
    match inv {
        Some(_) => r.line(format!(
            "{:>4}  {:>24}  {:>24}  {:>24}  {:>10}  status",
            "k", "phi_k", "denominator", "g_k", "margin"
        )),
        None => r.line(format!("{:>4}  {:>8}  status", "k", "flagged")),
    }
    for m in &field.modes {
        let status = match &m.issue {
            None => "ok".to_string(),
            Some(e) => format!("UNRELIABLE: {e}"),
        };
        let flagged = m.trajectory.as_ref().map_or(0, |t| t.flagged());
        match inv {
            Some(sol) => {
                let d = sol.denominators[m.k - 1];
                r.line(format!(
                    "{:>4}  {:>24}  {:>24}  {:>24}  {:>10.3e}  {status}",
                    m.k,
                    number(sol.phi_series.coeff(m.k), 17),
                    number(d, 17),
                    number(sol.g_series.coeff(m.k), 17),
                    d.abs() / sol.eps_den
                ));
            }
            None => r.line(format!("{:>4}  {:>8}  {status}", m.k, flagged)),
        }
    }
}

fn verification(r: &mut Report, res: &Residual, limits: &[ModeLimits], worst: f64) {
    r.section("verification");
    r.kv("residual max (rel. max|g|)", format!("{:.3e}", res.max_rel));
    r.kv("residual rms (rel. rms g)", format!("{:.3e}", res.l2_rel));
    r.kv("residual scale max|g|", format!("{:.3e}", res.scale));
    r.kv("start-up rows skipped", res.skipped_rows);
    r.kv("worst initial limit", format!("{worst:.3e}"));
    if let Some(l) = limits.iter().max_by(|a, b| a.max_abs().total_cmp(&b.max_abs())) {
        r.kv(
            "  attained at mode",
            format!("{} (first {:.3e}, second {:.3e})", l.k, l.first.value, l.second.value),
        );
    }
}

fn thresholds(mut out: Outcome, what: &str, res: &Residual, worst_limit: f64, synthesis: Option<f64>) -> Outcome {
    out.report.section(&format!("{what} checks"));
    let mut checks = vec![
        ("residual", res.max_rel, RESIDUAL_TOL),
        ("initial limits", worst_limit, LIMIT_TOL),
    ];
    if let Some(s) = synthesis {
        checks.push(("final-time synthesis", s, SYNTHESIS_TOL));
    }
    let mut failed = Vec::new();
    for (name, value, tol) in checks {
        let pass = value <= tol;
        out.report.line(format!(
            "{} {name:<22} {value:.3e} <= {tol:.0e}",
            if pass { "PASS" } else { "FAIL" }
        ));
        if !pass {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        out
    } else {
        out.fail(EXIT_NUMERICAL, format!("{what} verification failed: {}", failed.join(", ")))
    }
}

fn inverse_tables(sol: &InverseSolution, digits: usize) -> anyhow::Result<Vec<Table>> {
    let mut series = Table::new("g_series.csv", &["k", "g_k", "phi_k", "denominator"])?;
    for k in 1..=sol.g_series.modes() {
        series.row([
            k.to_string(),
            number(sol.g_series.coeff(k), digits),
            number(sol.phi_series.coeff(k), digits),
            number(sol.denominators[k - 1], digits),
        ])?;
    }
    let mut g = Table::new("g_field.csv", &["x", "g"])?;
    let values = synthesize(&sol.g_series, &sol.field.space);
    for (x, v) in sol.field.space.points().into_iter().zip(values) {
        g.row([number(x, digits), number(v, digits)])?;
    }
    Ok(vec![field_table(&sol.field, digits)?, series, g])
}
