use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use fracsolve_core::specfun::{ml_bivariate, MLParams, SeriesControl};

mod config;
mod output;
mod run;
mod selftest;

use config::{parse_config, Mode, DEFAULT_SPACE_INTERVALS};
use run::{EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION};

/// Two-term time-fractional diffusion with Hilfer derivatives: direct and
/// inverse source problems on (0, T) x (0, 1).
#[derive(Parser)]
#[command(name = "fracsolve", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for u given the source in [source].
    Direct(RunArgs),
    /// Recover g(x) and u from the final-time observation in [observation].
    Inverse(RunArgs),
    /// Solve, check residual, initial limits and final-time fit; report only.
    Verify(RunArgs),
    /// Evaluate the bivariate Mittag-Leffler function E_{(a,b),rho}(x, y).
    Mlf(MlfArgs),
    /// Run built-in smoke checks.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Number of sine modes K.
    #[arg(long)]
    k: Option<usize>,
    /// Number of time intervals N_t.
    #[arg(long)]
    nt: Option<usize>,
    /// Proceed when the data fail the compatibility checks.
    #[arg(long)]
    waive_compat: bool,
    /// Floor on |denominator| for the inverse problem.
    #[arg(long)]
    eps_den: Option<f64>,
}

#[derive(Args)]
struct MlfArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    rho: f64,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, allow_hyphen_values = true)]
    y: f64,
    #[arg(long, default_value_t = SeriesControl::default().tol)]
    tol: f64,
}

fn init_threads() -> Result<()> {
    let threads = match std::env::var("FRACSOLVE_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .with_context(|| format!("FRACSOLVE_THREADS must be a non-negative integer, got {v:?}"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn run_workflow(mode: Mode, args: RunArgs) -> Result<i32> {
    let mut cfg = match parse_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            let msg = e.to_string();
            let mut report = output::Report::default();
            report.section("error");
            report.line(&msg);
            if let Ok(path) = report.write(&run::out_dir(None, args.out_dir)) {
                eprintln!("report: {}", path.display());
            }
            eprintln!("error: {msg}");
            return Ok(EXIT_VALIDATION);
        }
    };
    if let Some(k) = args.k {
        cfg.modes = k;
        if !cfg.space_explicit {
            cfg.space_intervals = DEFAULT_SPACE_INTERVALS.max(2 * k);
        }
    }
    if let Some(nt) = args.nt {
        cfg.time_intervals = nt;
    }
    cfg.waive_compat |= args.waive_compat;
    if args.eps_den.is_some() {
        cfg.eps_den = args.eps_den;
    }
    let dir = run::out_dir(Some(&cfg), args.out_dir);

    let outcome = run::run(&cfg, mode);
    let mut written = output::write_tables(&dir, outcome.tables)?;
    written.push(outcome.report.write(&dir)?);
    for p in &written {
        eprintln!("wrote {}", p.display());
    }
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    Ok(outcome.code)
}

fn mlf(args: MlfArgs) -> Result<i32> {
    let ctrl = SeriesControl {
        tol: args.tol,
        ..SeriesControl::default()
    };
    let p = MLParams::new(args.a, args.b, args.rho)
        .and_then(|p| ctrl.validate().map(|_| p));
    let p = match p {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_VALIDATION);
        }
    };
    match ml_bivariate(&p, args.x, args.y, &ctrl) {
        Ok(v) => {
            println!("{}", output::number(v, 17));
            Ok(EXIT_OK)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_VALIDATION })
        }
    }
}

fn selftest() -> i32 {
    let mut code = EXIT_OK;
    for (label, result) in selftest::run() {
        match result {
            Ok(c) => {
                let verdict = if c.passed() { "PASS" } else { "FAIL" };
                println!("{verdict} {label:<13} {:<42} {:.3e} <= {:.0e}", c.name, c.measured, c.tolerance);
                if !c.passed() {
                    code = EXIT_NUMERICAL;
                }
            }
            Err(e) => {
                println!("FAIL {label:<13} {e}");
                code = EXIT_NUMERICAL;
            }
        }
    }
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = init_threads().and_then(|_| match cli.command {
        Command::Direct(a) => run_workflow(Mode::Direct, a),
        Command::Inverse(a) => run_workflow(Mode::Inverse, a),
        Command::Verify(a) => run_workflow(Mode::Verify, a),
        Command::Mlf(a) => mlf(a),
        Command::Selftest => Ok(selftest()),
    });
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
