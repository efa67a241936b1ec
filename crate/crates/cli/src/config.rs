//! Run configuration: a TOML file with [orders], [discretization], [source]
//! or [observation], [solver] and [output] tables.

use std::fs;
use std::path::{Path, PathBuf};

use fracsolve_core::functions::{SpaceFunction, TimeFunction};
use fracsolve_core::FractionalOrders;
use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

pub const DEFAULT_MODES: usize = 64;
pub const DEFAULT_TIME_INTERVALS: usize = 2000;
pub const DEFAULT_SPACE_INTERVALS: usize = 1024;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: line {line}: {message}")]
    Validation { path: PathBuf, line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Direct,
    Inverse,
    Verify,
    Mlf,
    Selftest,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<Spanned<Mode>>,
    orders: RawOrders,
    #[serde(default)]
    discretization: RawDiscretization,
    source: Option<RawFunction>,
    observation: Option<RawFunction>,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOrders {
    alpha1: Spanned<f64>,
    alpha2: Spanned<f64>,
    beta1: Spanned<f64>,
    beta2: Spanned<f64>,
    mu: Spanned<f64>,
    #[serde(rename = "T", alias = "t_end")]
    t_end: Spanned<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiscretization {
    #[serde(rename = "K", alias = "k")]
    modes: Option<Spanned<i64>>,
    #[serde(rename = "N_t", alias = "nt")]
    time_intervals: Option<Spanned<i64>>,
    #[serde(rename = "M", alias = "m")]
    space_intervals: Option<Spanned<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunction {
    kind: Spanned<String>,
    n: Option<Spanned<i64>>,
    amplitude: Option<f64>,
    coeffs: Option<Vec<f64>>,
    boundary_factor: Option<bool>,
    file: Option<Spanned<PathBuf>>,
    /// Pairs [c, p] of Σ c t^p; sources only.
    time: Option<Spanned<Vec<(f64, f64)>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    #[serde(default)]
    waive_compat: bool,
    eps_den: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    precision: Option<Spanned<i64>>,
}

/// A space profile together with how it was specified.
#[derive(Debug, Clone)]
pub struct FunctionConfig {
    pub space: SpaceFunction,
    pub time: TimeFunction,
    pub description: String,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub path: PathBuf,
    pub mode: Option<Mode>,
    pub orders: FractionalOrders,
    pub modes: usize,
    pub time_intervals: usize,
    pub space_intervals: usize,
    /// Whether M was given rather than defaulted.
    pub space_explicit: bool,
    pub source: Option<FunctionConfig>,
    pub observation: Option<FunctionConfig>,
    pub waive_compat: bool,
    pub eps_den: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub precision: usize,
}

impl RunConfig {
    /// Checks the discretization after command-line overrides.
    pub fn check_discretization(&self) -> Result<(), ConfigError> {
        if self.modes == 0 {
            return Err(ConfigError::Invalid("K must be at least 1".into()));
        }
        if self.time_intervals < 2 {
            return Err(ConfigError::Invalid(format!("N_t must be at least 2, got {}", self.time_intervals)));
        }
        if self.space_intervals < 2 * self.modes {
            return Err(ConfigError::Invalid(format!(
                "M = {} cannot resolve K = {} modes (need M >= 2K)",
                self.space_intervals, self.modes
            )));
        }
        if let Some(e) = self.eps_den {
            if !(e.is_finite() && e > 0.0) {
                return Err(ConfigError::Invalid(format!("eps_den must be positive, got {e}")));
            }
        }
        Ok(())
    }
}

struct Ctx<'a> {
    path: &'a Path,
    text: &'a str,
}

impl Ctx<'_> {
    fn line(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    fn err<T>(&self, span: std::ops::Range<usize>, message: impl Into<String>) -> Result<T, ConfigError> {
        Err(ConfigError::Validation {
            path: self.path.to_path_buf(),
            line: self.line(span.start),
            message: message.into(),
        })
    }

    fn count(&self, v: &Spanned<i64>, name: &str, min: i64) -> Result<usize, ConfigError> {
        if *v.get_ref() < min {
            return self.err(v.span(), format!("{name} must be at least {min}, got {}", v.get_ref()));
        }
        Ok(*v.get_ref() as usize)
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_str(&text, path)
}

pub fn parse_str(text: &str, path: &Path) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let ctx = Ctx { path, text };
    let orders = check_orders(&ctx, &raw.orders)?;

    let d = &raw.discretization;
    let modes = d.modes.as_ref().map(|v| ctx.count(v, "K", 1)).transpose()?.unwrap_or(DEFAULT_MODES);
    let time_intervals = d
        .time_intervals
        .as_ref()
        .map(|v| ctx.count(v, "N_t", 2))
        .transpose()?
        .unwrap_or(DEFAULT_TIME_INTERVALS);
    let space_intervals = match &d.space_intervals {
        Some(v) => {
            let m = ctx.count(v, "M", 2)?;
            if m < 2 * modes {
                return ctx.err(v.span(), format!("M = {m} cannot resolve K = {modes} modes (need M >= 2K)"));
            }
            m
        }
        None => DEFAULT_SPACE_INTERVALS.max(2 * modes),
    };

    let base = path.parent().unwrap_or(Path::new("."));
    let source = raw.source.as_ref().map(|f| function(&ctx, f, true, base)).transpose()?;
    let observation = raw.observation.as_ref().map(|f| function(&ctx, f, false, base)).transpose()?;

    let eps_den = match &raw.solver.eps_den {
        Some(e) if !(e.get_ref().is_finite() && *e.get_ref() > 0.0) => {
            return ctx.err(e.span(), format!("eps_den must be positive, got {}", e.get_ref()));
        }
        e => e.as_ref().map(|v| *v.get_ref()),
    };
    let precision = match &raw.output.precision {
        Some(p) if !(1..=17).contains(p.get_ref()) => {
            return ctx.err(p.span(), format!("precision must lie in 1..=17, got {}", p.get_ref()));
        }
        p => p.as_ref().map_or(17, |v| *v.get_ref() as usize),
    };
    let mode = raw.mode.as_ref().map(|m| *m.get_ref());
    match mode {
        Some(Mode::Direct) if source.is_none() => {
            return ctx.err(raw.mode.as_ref().unwrap().span(), "mode = \"direct\" needs a [source] table");
        }
        Some(Mode::Inverse) if observation.is_none() => {
            return ctx.err(raw.mode.as_ref().unwrap().span(), "mode = \"inverse\" needs an [observation] table");
        }
        _ => {}
    }

    Ok(RunConfig {
        path: path.to_path_buf(),
        mode,
        orders,
        modes,
        time_intervals,
        space_intervals,
        space_explicit: d.space_intervals.is_some(),
        source,
        observation,
        waive_compat: raw.solver.waive_compat,
        eps_den,
        out_dir: raw.output.dir.map(|d| base.join(d)),
        precision,
    })
}

fn check_orders(ctx: &Ctx, o: &RawOrders) -> Result<FractionalOrders, ConfigError> {
    let fields = [
        ("alpha1", &o.alpha1),
        ("alpha2", &o.alpha2),
        ("beta1", &o.beta1),
        ("beta2", &o.beta2),
        ("mu", &o.mu),
        ("T", &o.t_end),
    ];
    for (name, v) in fields {
        if !v.get_ref().is_finite() {
            return ctx.err(v.span(), format!("{name} must be finite"));
        }
    }
    let (a1, a2) = (*o.alpha1.get_ref(), *o.alpha2.get_ref());
    if !(a1 < 1.0) {
        return ctx.err(o.alpha1.span(), format!("alpha1 = {a1} must be < 1 (0<α₂<α₁<1 violated)"));
    }
    if !(a2 > 0.0) {
        return ctx.err(o.alpha2.span(), format!("alpha2 = {a2} must be > 0 (0<α₂<α₁<1 violated)"));
    }
    if !(a2 < a1) {
        return ctx.err(
            o.alpha2.span(),
            format!("alpha2 must be < alpha1, got alpha2 = {a2}, alpha1 = {a1} (0<α₂<α₁<1 violated)"),
        );
    }
    for (name, v) in [("beta1", &o.beta1), ("beta2", &o.beta2)] {
        if !(0.0..=1.0).contains(v.get_ref()) {
            return ctx.err(v.span(), format!("{name} = {} must lie in [0, 1]", v.get_ref()));
        }
    }
    if *o.mu.get_ref() < 0.0 {
        return ctx.err(o.mu.span(), format!("mu = {} must be non-negative", o.mu.get_ref()));
    }
    if !(*o.t_end.get_ref() > 0.0) {
        return ctx.err(o.t_end.span(), format!("T = {} must be positive", o.t_end.get_ref()));
    }
    FractionalOrders::new(a1, a2, *o.beta1.get_ref(), *o.beta2.get_ref(), *o.mu.get_ref(), *o.t_end.get_ref())
        .map_err(|e| ConfigError::Invalid(e.to_string()))
}

fn function(ctx: &Ctx, f: &RawFunction, allow_time: bool, base: &Path) -> Result<FunctionConfig, ConfigError> {
    let kind = f.kind.get_ref().as_str();
    let unexpected = |key: &str, present: bool| -> Result<(), ConfigError> {
        if present {
            ctx.err(f.kind.span(), format!("key `{key}` does not apply to kind = \"{kind}\""))
        } else {
            Ok(())
        }
    };
    let (space, description) = match kind {
        "sine" => {
            unexpected("coeffs", f.coeffs.is_some())?;
            unexpected("boundary_factor", f.boundary_factor.is_some())?;
            unexpected("file", f.file.is_some())?;
            let n = match &f.n {
                Some(n) => ctx.count(n, "n", 1)?,
                None => 1,
            };
            let a = f.amplitude.unwrap_or(1.0);
            let wave = if n == 1 { "sin(πx)".to_string() } else { format!("sin({n}πx)") };
            (SpaceFunction::sine(n, a), scaled(a, &wave))
        }
        "parabola" => {
            unexpected("n", f.n.is_some())?;
            unexpected("coeffs", f.coeffs.is_some())?;
            unexpected("boundary_factor", f.boundary_factor.is_some())?;
            unexpected("file", f.file.is_some())?;
            let a = f.amplitude.unwrap_or(1.0);
            (SpaceFunction::with_boundary_factor(&[a]), scaled(a, "x(1-x)"))
        }
        "polynomial" => {
            unexpected("n", f.n.is_some())?;
            unexpected("file", f.file.is_some())?;
            let Some(coeffs) = f.coeffs.clone() else {
                return ctx.err(f.kind.span(), "kind = \"polynomial\" needs `coeffs`");
            };
            let a = f.amplitude.unwrap_or(1.0);
            let coeffs: Vec<f64> = coeffs.iter().map(|c| a * c).collect();
            if f.boundary_factor.unwrap_or(false) {
                (
                    SpaceFunction::with_boundary_factor(&coeffs),
                    format!("x(1-x)·polynomial {coeffs:?}"),
                )
            } else {
                (SpaceFunction::polynomial(coeffs.clone()), format!("polynomial {coeffs:?}"))
            }
        }
        "tabulated" => {
            unexpected("n", f.n.is_some())?;
            unexpected("coeffs", f.coeffs.is_some())?;
            unexpected("boundary_factor", f.boundary_factor.is_some())?;
            let Some(file) = &f.file else {
                return ctx.err(f.kind.span(), "kind = \"tabulated\" needs `file`");
            };
            let full = base.join(file.get_ref());
            let (x, mut v) = match read_table(&full) {
                Ok(t) => t,
                Err(msg) => return ctx.err(file.span(), msg),
            };
            if let Some(a) = f.amplitude {
                v.iter_mut().for_each(|y| *y *= a);
            }
            let rows = x.len();
            match SpaceFunction::tabulated(x, v) {
                Ok(s) => (s, format!("table {} ({rows} rows, linear interpolation)", full.display())),
                Err(e) => return ctx.err(file.span(), e.to_string()),
            }
        }
        other => {
            return ctx.err(
                f.kind.span(),
                format!("unknown kind \"{other}\" (expected sine, parabola, polynomial or tabulated)"),
            );
        }
    };
    let time = match &f.time {
        Some(t) if !allow_time => return ctx.err(t.span(), "an observation cannot depend on time"),
        Some(t) => match TimeFunction::new(t.get_ref().clone()) {
            Ok(tf) => tf,
            Err(e) => return ctx.err(t.span(), e.to_string()),
        },
        None => TimeFunction::constant(1.0),
    };
    let description = if time.is_constant() && time.eval(0.0) == 1.0 {
        description
    } else {
        let terms: Vec<String> = time.terms().iter().map(|(c, p)| format!("{c}·t^{p}")).collect();
        format!("({}) · {description}", terms.join(" + "))
    };
    Ok(FunctionConfig {
        space,
        time,
        description,
    })
}

fn scaled(a: f64, f: &str) -> String {
    if a == 1.0 {
        f.to_string()
    } else {
        format!("{a}·{f}")
    }
}

/// Two-column CSV (x, value) with a header row.
fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), String> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| format!("cannot read table {}: {e}", path.display()))?;
    let mut x = Vec::new();
    let mut v = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        if rec.len() != 2 {
            return Err(format!("{}: row {} has {} columns, expected 2", path.display(), i + 2, rec.len()));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("{}: row {}: {e}", path.display(), i + 2))
        };
        x.push(parse(&rec[0])?);
        v.push(parse(&rec[1])?);
    }
    Ok((x, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        parse_str(text, Path::new("test.toml"))
    }

    const ORDERS: &str = "[orders]\nalpha1 = 0.8\nalpha2 = 0.4\nbeta1 = 1\nbeta2 = 0.5\nmu = 0.5\nT = 1\n";

    #[test]
    fn defaults_are_filled() {
        let c = parse(ORDERS).unwrap();
        assert_eq!((c.modes, c.time_intervals, c.space_intervals), (64, 2000, 1024));
        assert_eq!(c.precision, 17);
        assert!(!c.waive_compat);
        assert_eq!(c.orders.beta2, 0.5);
    }

    #[test]
    fn order_violation_cites_the_line() {
        let text = ORDERS.replace("alpha1 = 0.8", "alpha1 = 0.5").replace("alpha2 = 0.4", "alpha2 = 0.9");
        let e = parse(&text).unwrap_err();
        let msg = e.to_string();
        assert!(matches!(e, ConfigError::Validation { line: 3, .. }), "{msg}");
        assert!(msg.contains("alpha2 must be < alpha1"), "{msg}");
        assert!(msg.contains("0<α₂<α₁<1"), "{msg}");
    }

    #[test]
    fn every_order_invariant_is_checked() {
        for (from, to) in [
            ("alpha1 = 0.8", "alpha1 = 1.0"),
            ("alpha2 = 0.4", "alpha2 = 0"),
            ("beta1 = 1", "beta1 = 1.5"),
            ("beta2 = 0.5", "beta2 = -0.5"),
            ("mu = 0.5", "mu = -1"),
            ("T = 1", "T = 0"),
        ] {
            let e = parse(&ORDERS.replace(from, to)).unwrap_err();
            assert!(matches!(e, ConfigError::Validation { .. }), "{to}: {e}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = parse(&format!("{ORDERS}gamma = 2\n")).unwrap_err();
        assert!(e.to_string().contains("unknown field"), "{e}");
        let e = parse(&format!("{ORDERS}[discretization]\nK = 8\nL = 3\n")).unwrap_err();
        assert!(e.to_string().contains("unknown field"), "{e}");
    }

    #[test]
    fn parse_errors_report_position() {
        let e = parse("[orders]\nalpha1 = \n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn functions_and_time_factors() {
        let c = parse(&format!(
            "{ORDERS}[source]\nkind = \"parabola\"\ntime = [[1.0, 1.0]]\n[observation]\nkind = \"sine\"\nn = 3\n"
        ))
        .unwrap();
        let s = c.source.unwrap();
        assert_eq!(s.space.eval(0.5, 0), 0.25);
        assert_eq!(s.time.eval(2.0), 2.0);
        assert_eq!(c.observation.unwrap().space, SpaceFunction::sine(3, 1.0));
        let e = parse(&format!("{ORDERS}[observation]\nkind = \"sine\"\ntime = [[1.0, 1.0]]\n")).unwrap_err();
        assert!(e.to_string().contains("cannot depend on time"));
        let e = parse(&format!("{ORDERS}[source]\nkind = \"sine\"\ncoeffs = [1.0]\n")).unwrap_err();
        assert!(e.to_string().contains("does not apply"));
    }

    #[test]
    fn grid_must_resolve_the_modes() {
        let e = parse(&format!("{ORDERS}[discretization]\nK = 64\nM = 100\n")).unwrap_err();
        assert!(e.to_string().contains("need M >= 2K"), "{e}");
    }
}
