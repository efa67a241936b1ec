use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fracsolve_core::direct::{solve_direct, solver_control, step_response, DirectProblemSpec, Source};
use fracsolve_core::functions::SpaceFunction;
use fracsolve_core::specfun::gamma;
use fracsolve_core::spectral::analyze;
use fracsolve_core::{FractionalOrders, SpaceGrid};
use tempfile::TempDir;

const ORDERS: &str = "[orders]\nalpha1 = 0.8\nalpha2 = 0.4\nbeta1 = 1\nbeta2 = 0.5\nmu = 0.5\nT = 1\n";

fn orders() -> FractionalOrders {
    FractionalOrders::new(0.8, 0.4, 1.0, 0.5, 0.5, 1.0).unwrap()
}

fn fracsolve(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracsolve"))
        .args(args)
        .current_dir(cwd)
        .env("FRACSOLVE_THREADS", "1")
        .output()
        .unwrap()
}

fn run_config(dir: &TempDir, mode: &str, body: &str, extra: &[&str]) -> (Output, PathBuf) {
    let cfg = dir.path().join(format!("{mode}.toml"));
    fs::write(&cfg, format!("{ORDERS}{body}")).unwrap();
    let out = dir.path().join(format!("out-{mode}"));
    let mut args = vec![mode, "--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    (fracsolve(&args, dir.path()), out)
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|s| s.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn csv_files(dir: &Path) -> usize {
    fs::read_dir(dir)
        .map(|r| r.filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv")).count())
        .unwrap_or(0)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SINE_SOURCE: &str = "[discretization]\nK = 4\nN_t = 100\nM = 16\n[source]\nkind = \"sine\"\n";

#[test]
fn mlf_at_origin_prints_reciprocal_gamma() {
    let dir = TempDir::new().unwrap();
    let o = fracsolve(&["mlf", "--a", "0.3", "--b", "0.7", "--rho", "1.7", "--x", "0", "--y", "0"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let v: f64 = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
    assert!((v - 1.0 / gamma(1.7).unwrap()).abs() <= 1e-16);
}

#[test]
fn mlf_rejects_bad_orders_and_accepts_negative_arguments() {
    let dir = TempDir::new().unwrap();
    let o = fracsolve(&["mlf", "--a", "0", "--b", "0.3", "--rho", "1", "--x", "0", "--y", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = fracsolve(&["mlf", "--a", "0.3", "--b", "0.7", "--rho", "1.7", "--x", "-1", "--y", "-2.5"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn selftest_passes() {
    let dir = TempDir::new().unwrap();
    let o = fracsolve(&["selftest"], dir.path());
    assert!(o.status.success());
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 6, "{out}");
}

#[test]
fn order_violation_exits_2_with_line_and_no_output() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, ORDERS.replace("alpha1 = 0.8", "alpha1 = 0.5").replace("alpha2 = 0.4", "alpha2 = 0.9")).unwrap();
    let out = dir.path().join("out");
    let o = fracsolve(
        &["direct", "--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 3") && err.contains("alpha2 must be < alpha1"), "{err}");
    assert!(fs::read_to_string(out.join("report.txt")).unwrap().contains("0<α₂<α₁<1"));
    assert_eq!(csv_files(&out), 0);
}

#[test]
fn unknown_key_and_missing_file_exit_2() {
    let dir = TempDir::new().unwrap();
    let (o, _) = run_config(&dir, "direct", "[source]\nkind = \"sine\"\nwavelength = 2\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown field"), "{}", stderr(&o));
    let o = fracsolve(&["direct", "--config", "nope.toml", "--out-dir", "o"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mode_mismatch_and_missing_table_exit_2() {
    let dir = TempDir::new().unwrap();
    let (o, _) = run_config(&dir, "inverse", &format!("mode = \"direct\"\n{SINE_SOURCE}"), &[]);
    // `mode` must precede the tables in TOML, so this is a parse error.
    assert_eq!(o.status.code(), Some(2));
    let dir2 = TempDir::new().unwrap();
    let cfg = dir2.path().join("m.toml");
    fs::write(&cfg, format!("mode = \"direct\"\n{ORDERS}{SINE_SOURCE}")).unwrap();
    let o = fracsolve(&["inverse", "--config", cfg.to_str().unwrap(), "--out-dir", "o"], dir2.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mode"), "{}", stderr(&o));
    // verify checks whichever problem the config declares.
    let o = fracsolve(&["verify", "--config", cfg.to_str().unwrap(), "--out-dir", "v"], dir2.path());
    assert_ne!(o.status.code(), Some(2), "{}", stderr(&o));
    let report = fs::read_to_string(dir2.path().join("v/report.txt")).unwrap();
    assert!(report.contains("residual") && !report.contains("subcommand"), "{report}");
    let (o, _) = run_config(&dir, "direct", "[observation]\nkind = \"sine\"\n", &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn direct_sine_run_matches_step_response() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run_config(&dir, "direct", SINE_SOURCE, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out.join("u_field.csv"));
    assert_eq!(header, ["t", "x", "u"]);
    assert_eq!(rows.len(), 101 * 17);
    let ctrl = solver_control();
    for r in rows.iter().filter(|r| r[1] == 0.5) {
        let want = step_response(1, &orders(), r[0], &ctrl).unwrap();
        assert!((r[2] - want).abs() <= 1e-12, "t = {}: {} vs {want}", r[0], r[2]);
    }
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    for needle in ["route", "strong source class", "residual max", "worst initial limit", "[modes]"] {
        assert!(report.contains(needle), "missing {needle}:\n{report}");
    }
}

#[test]
fn csv_round_trips_the_computed_field_bit_for_bit() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run_config(&dir, "direct", SINE_SOURCE, &[]);
    assert!(o.status.success());
    let spec = DirectProblemSpec {
        modes: 4,
        time_intervals: 100,
        space_intervals: 16,
        ..DirectProblemSpec::new(orders(), Source::stationary(SpaceFunction::sine(1, 1.0)))
    };
    let field = solve_direct(&spec).unwrap().field;
    let (_, rows) = read_csv(&out.join("u_field.csv"));
    for (r, u) in rows.iter().zip(field.u.iter()) {
        assert_eq!(r[2].to_bits(), u.to_bits());
    }
}

#[test]
fn runs_are_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let body = "[discretization]\nK = 6\nN_t = 80\nM = 32\n[source]\nkind = \"polynomial\"\ncoeffs = [1.0, -2.0]\nboundary_factor = true\ntime = [[1.0, 0.0], [0.5, 1.5]]\n";
    let cfg = dir.path().join("d.toml");
    fs::write(&cfg, format!("{ORDERS}{body}")).unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("o{i}"));
        let o = Command::new(env!("CARGO_BIN_EXE_fracsolve"))
            .args(["direct", "--waive-compat", "--config", cfg.to_str().unwrap(), "--out-dir"])
            .arg(&out)
            .env("FRACSOLVE_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(fs::read(out.join("u_field.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn incompatible_source_exits_2_unless_waived() {
    let dir = TempDir::new().unwrap();
    let body = "[discretization]\nK = 4\nN_t = 50\nM = 16\n[source]\nkind = \"parabola\"\n";
    let (o, out) = run_config(&dir, "direct", body, &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert_eq!(csv_files(&out), 0);
    let (o, out) = run_config(&dir, "direct", body, &["--waive-compat"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(out.join("report.txt")).unwrap().contains("waived"));
}

#[test]
fn overrides_replace_config_values() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run_config(&dir, "direct", SINE_SOURCE, &["--k", "2", "--nt", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = read_csv(&out.join("u_field.csv"));
    assert_eq!(rows.len(), 21 * 17);
    let (o, _) = run_config(&dir, "direct", SINE_SOURCE, &["--k", "40"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2K"), "{}", stderr(&o));
}

#[test]
fn inverse_run_writes_series_and_reproduces_the_observation() {
    let dir = TempDir::new().unwrap();
    let body = "[discretization]\nK = 8\nN_t = 50\nM = 64\n[observation]\nkind = \"sine\"\nn = 2\namplitude = 0.5\n";
    let (o, out) = run_config(&dir, "inverse", body, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, series) = read_csv(&out.join("g_series.csv"));
    assert_eq!(header, ["k", "g_k", "phi_k", "denominator"]);
    assert_eq!(series.len(), 8);
    let g2 = series[1][1];
    assert!((g2 * series[1][3] - 0.5).abs() < 1e-12);
    let (header, gx) = read_csv(&out.join("g_field.csv"));
    assert_eq!(header, ["x", "g"]);
    assert!((gx[16][1] - g2 * (2.0 * PI * 0.25).sin()).abs() < 1e-10);
    let (_, u) = read_csv(&out.join("u_field.csv"));
    for r in u.iter().filter(|r| r[0] == 1.0) {
        assert!((r[2] - 0.5 * (2.0 * PI * r[1]).sin()).abs() <= 1e-12);
    }
    assert!(fs::read_to_string(out.join("report.txt")).unwrap().contains("margin"));
}

#[test]
fn inverse_of_a_direct_run_recovers_the_source() {
    let dir = TempDir::new().unwrap();
    let (m, k) = (128, 8);
    let body = format!("[discretization]\nK = {k}\nN_t = 400\nM = {m}\n[source]\nkind = \"parabola\"\n");
    let (o, out) = run_config(&dir, "direct", &body, &["--waive-compat"]);
    assert!(o.status.success(), "{}", stderr(&o));
    // Final-time row as a table for the inverse run.
    let (_, rows) = read_csv(&out.join("u_field.csv"));
    let mut table = String::from("x,phi\n");
    for r in rows.iter().filter(|r| r[0] == 1.0) {
        table.push_str(&format!("{:.16e},{:.16e}\n", r[1], r[2]));
    }
    fs::write(dir.path().join("phi.csv"), table).unwrap();
    let body = format!("[discretization]\nK = {k}\nN_t = 400\nM = {m}\n[observation]\nkind = \"tabulated\"\nfile = \"phi.csv\"\n");
    let (o, out) = run_config(&dir, "inverse", &body, &["--waive-compat"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("finite-difference"));
    let (_, series) = read_csv(&out.join("g_series.csv"));
    let grid = SpaceGrid::new(m).unwrap();
    let want = analyze(&grid.sample(|x| x * (1.0 - x)), k).unwrap();
    for (i, r) in series.iter().enumerate() {
        let w = want.coeff(i + 1);
        assert!((r[1] - w).abs() <= 1e-9 * want.coeff(1), "k = {}: {} vs {w}", i + 1, r[1]);
    }
}

#[test]
fn tabulated_observation_with_513_rows_is_resampled() {
    let dir = TempDir::new().unwrap();
    let mut table = String::from("x,value\n");
    for j in 0..=512 {
        let x = j as f64 / 512.0;
        table.push_str(&format!("{x},{}\n", (PI * x).sin()));
    }
    fs::write(dir.path().join("phi.csv"), table).unwrap();
    let body = "[discretization]\nK = 8\nN_t = 50\nM = 1024\n[observation]\nkind = \"tabulated\"\nfile = \"phi.csv\"\n";
    // On the finer grid the interpolant has a kink at every table node, which
    // the compatibility check sees.
    let (o, out) = run_config(&dir, "inverse", body, &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("f' continuous"), "{}", stderr(&o));
    assert_eq!(csv_files(&out), 0);
    let (o, out) = run_config(&dir, "inverse", body, &["--waive-compat"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, series) = read_csv(&out.join("g_series.csv"));
    // Linear interpolation of sin(πx) at h = 1/512 is off by at most π²h²/8.
    let interp = PI * PI / 8.0 / 512.0f64.powi(2);
    assert!((series[0][2] - 1.0).abs() <= interp, "{}", series[0][2]);
    for r in &series[1..] {
        assert!(r[2].abs() <= interp);
    }
    let (_, u) = read_csv(&out.join("u_field.csv"));
    for r in u.iter().filter(|r| r[0] == 1.0) {
        assert!((r[2] - (PI * r[1]).sin()).abs() <= 2.0 * interp);
    }
}

#[test]
fn verify_reports_and_exits_by_thresholds() {
    let dir = TempDir::new().unwrap();
    let body = "[discretization]\nK = 4\nN_t = 200\nM = 32\n[observation]\nkind = \"sine\"\n";
    let (o, out) = run_config(&dir, "verify", body, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_files(&out), 0);
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("PASS residual") && report.contains("PASS final-time synthesis"), "{report}");
    // A coarse grid cannot meet the residual threshold.
    let body = "[discretization]\nK = 8\nN_t = 4\nM = 16\n[source]\nkind = \"sine\"\nn = 8\n";
    let (o, out) = run_config(&dir, "verify", body, &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(fs::read_to_string(out.join("report.txt")).unwrap().contains("FAIL residual"));
}
