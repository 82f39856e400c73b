use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use squeezed_cli::dump::read_density;

fn squeezed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squeezed"))
        .args(args)
        .output()
        .expect("run the squeezed binary")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

fn run_in(dir: &Path, sub: &str, config: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, config.to_str().unwrap(), "--out-dir", dir.to_str().unwrap(), "--quiet"];
    args.extend_from_slice(extra);
    squeezed(&args)
}

/// Parses a timeseries CSV into its header and numeric columns (blank cells as NaN).
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| if c.is_empty() { f64::NAN } else { c.parse().unwrap() }).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k]).collect()
}

#[test]
fn ground_state_timeseries_is_stationary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"scenarios": [{"name": "g", "grid": {"n_points": 256}, "outputs": ["timeseries", "verify"]}]}"#);
    let out = run_in(dir.path(), "run", &config, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("g.timeseries.csv"));
    assert_eq!(
        header.join(","),
        "t,A,B,phi,x_c,p_c,var_x,var_p,cov_xp,uncertainty_product,purity,fidelity_numeric"
    );
    assert_eq!(rows.len(), 65);
    for v in column(&header, &rows, "A") {
        assert_eq!(v, 1.0);
    }
    for v in column(&header, &rows, "B") {
        assert_eq!(v, 0.0);
    }
    for v in column(&header, &rows, "var_x") {
        assert!((v - 0.5).abs() < 1e-12);
    }
}

#[test]
fn shape_oscillates_twice_as_fast_as_the_center() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"scenarios": [{"name": "d", "squeeze": {"A0": 2.0, "dA": 1.7320508075688772, "phi_sq": 0.3},
            "center": {"amplitude": 2.0, "phase": 0.1}, "grid": {"n_points": 256},
            "sample_times": {"periods": 2, "per_period": 16}, "outputs": ["timeseries"]}]}"#,
    );
    assert_eq!(run_in(dir.path(), "run", &config, &[]).status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("d.timeseries.csv"));
    let a = column(&header, &rows, "A");
    let xc = column(&header, &rows, "x_c");
    // 16 samples per period: A repeats after 8, x_c only after 16 and flips sign after 8
    for k in 0..16 {
        assert!((a[k] - a[k + 8]).abs() < 1e-12);
        assert!((xc[k] - xc[k + 16]).abs() < 1e-12);
        assert!((xc[k] + xc[k + 8]).abs() < 1e-12);
    }
    assert!(column(&header, &rows, "fidelity_numeric").iter().all(|f| *f > 1.0 - 1e-6));
    assert!(column(&header, &rows, "phi").iter().all(|f| f.is_finite()));
}

#[test]
fn mixed_state_has_constant_purity_and_blank_pure_columns() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"scenarios": [{"name": "m", "sigma_a": 0.7071067811865476, "grid": {"n_points": 128},
            "sample_times": [0.0, 0.5, 1.0, 4.0], "outputs": ["timeseries", "verify"]}]}"#,
    );
    let out = run_in(dir.path(), "run", &config, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("m.timeseries.csv"));
    for p in column(&header, &rows, "purity") {
        assert!((p - 0.5).abs() < 1e-10);
    }
    assert!(column(&header, &rows, "fidelity_numeric").iter().all(|f| f.is_nan()));
    assert!(column(&header, &rows, "phi").iter().all(|f| f.is_nan()));
    let report = std::fs::read_to_string(dir.path().join("m.verify.txt")).unwrap();
    assert!(report.lines().all(|l| l.starts_with("PASS")), "{report}");
}

#[test]
fn density_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"scenarios": [{"name": "a", "sigma_a": 0.3, "squeeze": {"A0": 1.25, "dA": 0.75}, "grid": {"n_points": 64}, "outputs": []},
                          {"name": "b", "center": {"amplitude": 1.0}, "grid": {"n_points": 48}, "outputs": []}]}"#,
    );
    let out = run_in(dir.path(), "dump-density", &config, &["--time", "0.75"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for (name, n) in [("a", 64), ("b", 48)] {
        let path = dir.path().join(format!("{name}.density.txt"));
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1 + n * n);
        assert!(text.lines().next().unwrap().starts_with(&format!("{n},")));
        let dm = read_density(&path).unwrap();
        assert_eq!(dm.time(), 0.75);
        assert!((dm.trace() - 1.0).abs() < 1e-8);
    }
    let out = run_in(dir.path(), "dump-density", &config, &["--time", "0.1", "--scenario", "nope"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_writes_only_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"scenarios": [{"name": "v", "initial_variance": 0.25, "grid": {"n_points": 256},
            "sample_times": {"periods": 0.5, "per_period": 8}, "outputs": ["timeseries"]}]}"#,
    );
    let out = squeezed(&["verify", config.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS v: propagated fidelity"), "{stdout}");
    assert!(dir.path().join("v.verify.txt").exists());
    assert!(!dir.path().join("v.timeseries.csv").exists());
}

#[test]
fn failing_verification_exits_one() {
    // a time step far too coarse for the fidelity target
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"scenarios": [{"name": "coarse", "squeeze": {"A0": 3.0, "dA": 2.8284271247461903}, "center": {"amplitude": 2.0},
            "grid": {"n_points": 256}, "propagator": {"scheme": "implicit-unitary", "dt": 0.2},
            "sample_times": [0.0, 3.0], "outputs": ["verify"]}]}"#,
    );
    let out = run_in(dir.path(), "run", &config, &[]);
    assert_eq!(out.status.code(), Some(1));
    let report = std::fs::read_to_string(dir.path().join("coarse.verify.txt")).unwrap();
    assert!(report.contains("FAIL coarse: propagated fidelity"), "{report}");
}

#[test]
fn invariant_violations_exit_three_with_the_invariant_named() {
    let dir = tempfile::tempdir().unwrap();
    for (text, needle) in [
        (r#"{"scenarios": [{"name": "x", "squeeze": {"A0": 0.5, "dA": 0.9}, "outputs": []}]}"#, "A0 > dA"),
        (r#"{"scenarios": [{"name": "x", "squeeze": {"A0": 1.0, "dA": 0.5}, "outputs": []}]}"#, "P = (A0 + dA)(A0 - dA) >= 1"),
        (r#"{"scenarios": [{"name": "x", "oscillator": {"mass": -1}, "outputs": []}]}"#, "m > 0"),
        (r#"{"scenarios": [{"name": "x", "sample_times": [1.0, 0.5], "outputs": []}]}"#, "strictly increasing"),
        (r#"{"scenarios": [{"name": "x", "sigma_a": -0.1, "outputs": []}]}"#, "sigma_a >= 0"),
        (r#"{"scenarios": [{"name": "x", "outputs": []}, {"name": "x", "outputs": []}]}"#, "unique"),
    ] {
        let config = write_config(dir.path(), text);
        let out = run_in(dir.path(), "run", &config, &[]);
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(3), "{text}: {stderr}");
        assert!(stderr.contains(needle), "{needle}: {stderr}");
    }
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for text in [
        "not json",
        r#"{"scenarios": []}"#,
        r#"{"scenarios": [{"name": "x", "outputs": ["plot"]}]}"#,
        r#"{"scenarios": [{"name": "x", "outputs": [], "propagator": {"scheme": "euler"}}]}"#,
        r#"{"scenarios": [{"name": "x", "outputs": [], "squeeze": {"A0": 1, "dA": 0}, "initial_variance": 1}]}"#,
    ] {
        let config = write_config(dir.path(), text);
        assert_eq!(run_in(dir.path(), "run", &config, &[]).status.code(), Some(2), "{text}");
    }
    let missing = dir.path().join("missing.json");
    assert_eq!(run_in(dir.path(), "run", &missing, &[]).status.code(), Some(2));
    assert_eq!(squeezed(&["run"]).status.code(), Some(2));
}

#[test]
fn seed_changes_only_monte_carlo_results() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"scenarios": [{"name": "mc", "sigma_a": 0.4, "grid": {"n_points": 48}, "sample_times": [0.2],
            "ensemble": {"method": "monte-carlo", "samples": 2500, "seed": 3}, "outputs": ["verify"]}]}"#,
    );
    let report = |seed: &str| {
        let out = run_in(dir.path(), "run", &config, &["--seed", seed]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read_to_string(dir.path().join("mc.verify.txt")).unwrap()
    };
    let (a, b, c) = (report("1"), report("1"), report("2"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}
