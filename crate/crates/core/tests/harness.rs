use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use monozero::harness::{parse_config, run, run_file, Kind, Overrides, TraceFormat, EXIT_CONFIG, EXIT_IO};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_monozero")).args(args).output().unwrap()
}

#[test]
fn shipped_configs_parse_and_validate() {
    for entry in fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")).unwrap() {
        let path = entry.unwrap().path();
        let config = parse_config(&fs::read_to_string(&path).unwrap())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(config.violations().is_empty(), "{}", path.display());
        assert_eq!(parse_config(&config.to_json()).unwrap(), config);
    }
}

#[test]
fn linear_zero_reports_oracle_gap() {
    let dir = tempfile::tempdir().unwrap();
    let config = parse_config(&fs::read_to_string(config_path("linear_zero.json")).unwrap()).unwrap();
    let outcome = run(&config, Some(dir.path()));
    assert_eq!(outcome.exit_code, 0, "{}", outcome.summary);
    assert!(outcome.summary.contains("oracle gap"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("linear_zero.report.json")).unwrap()).unwrap();
    assert_eq!(report, outcome.report);
    let csv = fs::read_to_string(dir.path().join("linear_zero.csv")).unwrap();
    assert!(csv.starts_with("n,lambda,theta,residual_dual,step_norm,phi_to_ref"));
}

#[test]
fn json_override_writes_a_json_trace() {
    let dir = tempfile::tempdir().unwrap();
    let overrides = Overrides {
        out: Some(dir.path().to_path_buf()),
        format: Some(TraceFormat::Json),
        max_iter: Some(50),
        ..Overrides::default()
    };
    let outcome = run_file(Some(&config_path("power_l3.json")), &overrides);
    assert_eq!(outcome.exit_code, 3, "{}", outcome.summary);
    let trace = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "json") && !p.to_string_lossy().contains("report"))
        .expect("json trace written");
    let rows: serde_json::Value = serde_json::from_str(&fs::read_to_string(trace).unwrap()).unwrap();
    assert!(!rows.as_array().unwrap().is_empty());
}

#[test]
fn overrides_are_revalidated() {
    let overrides = Overrides {
        tol: Some(-1.0),
        ..Overrides::default()
    };
    let outcome = run_file(Some(&config_path("linear_zero.json")), &overrides);
    assert_eq!(outcome.exit_code, EXIT_CONFIG);
    assert!(outcome.summary.starts_with("error:"));
}

#[test]
fn missing_file_is_an_io_error() {
    let outcome = run_file(Some(Path::new("/nonexistent/config.json")), &Overrides::default());
    assert_eq!(outcome.exit_code, EXIT_IO);
    let outcome = run_file(
        None,
        &Overrides {
            kind: Some(Kind::Zero),
            ..Overrides::default()
        },
    );
    assert_eq!(outcome.exit_code, EXIT_CONFIG);
}

#[test]
fn cli_solve_writes_trace_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&[
        "solve",
        "--config",
        config_path("linear_zero.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("oracle gap"));
    assert!(dir.path().join("linear_zero.csv").exists());
    assert!(dir.path().join("linear_zero.report.json").exists());
}

#[test]
fn cli_vi_stops_on_iteration_limit() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&[
        "vi",
        "--config",
        config_path("vi_box.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--max-iter",
        "2000",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn cli_respath_and_gp() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = cli(&["respath", "--config", config_path("linear_path.json").to_str().unwrap(), "--out", d]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = cli(&["gp", "--config", config_path("vi_two_sets.json").to_str().unwrap(), "--out", d]);
    assert!(matches!(out.status.code(), Some(0) | Some(3)), "{:?}", out.status);
}

#[test]
fn cli_rejects_bad_config_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"kind": "zero", "space": {"n": 2}, "schedule": {"lambda0": 0.9, "a": 0.5, "theta0": 0.6, "b": 0.25}}"#)
        .unwrap();
    let out = cli(&["solve", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("theta0"), "{err}");
    assert!(err.contains("operator"), "{err}");
}

#[test]
fn cli_check_reports_the_failing_sandwich() {
    let out = cli(&["check"]);
    assert_eq!(out.status.code(), Some(6));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let fails: Vec<&str> = stdout.lines().filter(|l| l.starts_with("[FAIL]")).collect();
    assert_eq!(fails.len(), 2, "{stdout}");
    assert!(fails[0].contains("<= (|x| + |y|)^p, p = 3"), "{stdout}");
    assert!(fails[1].contains("<= (|x| + |y|)^p, p = 4"), "{stdout}");
}

#[test]
fn cli_seed_does_not_change_deterministic_traces() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config_path("power_l3.json");
    for (dir, seed) in [(&a, "1"), (&b, "2")] {
        let out = cli(&["solve", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--seed", seed]);
        assert_eq!(out.status.code(), Some(0));
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("power_l3.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn cli_minimize_converges() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&[
        "minimize",
        "--config",
        config_path("quartic_minimize.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("converged_residual"));
}
