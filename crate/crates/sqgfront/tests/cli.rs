use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sqgfront(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqgfront")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

const SMALL_RUN: &str = "\
[grid]
N = 512
L = 1024
[initial]
profile = gaussian
amplitude = 0.01
width = 8
[time]
dt = 0.25
t_end = 5
[output]
output_stride = 4
snapshot_stride = 10
[diagnostics]
energy = true
vector_field = true
";

#[test]
fn no_arguments_is_a_usage_error() {
    let out = sqgfront(&[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn simulate_writes_diagnostics_snapshots_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.cfg", SMALL_RUN);
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out_dir = dir.path().join(name);
            let out = sqgfront(&["simulate", "--config", &cfg, "--out-dir", out_dir.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
            out_dir
        })
        .collect();

    let csv = std::fs::read_to_string(runs[0].join("diagnostics.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("step[count],t[time],sobolev_norm[1]"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 1 + 5);
    assert!(rows.last().unwrap().starts_with("20,5.0,"));
    assert_eq!(csv, std::fs::read_to_string(runs[1].join("diagnostics.csv")).unwrap());

    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(runs[0].join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "ok");
    let files: Vec<_> = manifest["files"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    for name in ["diagnostics.csv", "snapshot_00000000.sqgf", "snapshot_00000010.sqgf", "snapshot_00000020.sqgf", "manifest.json"] {
        assert!(files.iter().any(|f| f.ends_with(name)), "{name} missing from {files:?}");
        assert!(runs[0].join(name).exists());
    }
    let other: Value = serde_json::from_str(&std::fs::read_to_string(runs[1].join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_hash"], other["config_hash"]);
}

#[test]
fn restart_from_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.cfg", SMALL_RUN);
    let first = dir.path().join("first");
    assert_eq!(sqgfront(&["simulate", "--config", &cfg, "--out-dir", first.to_str().unwrap()]).status.code(), Some(0));
    let restart = SMALL_RUN.replace("profile = gaussian", "path = first/snapshot_00000010.sqgf").replace("t_end = 5", "t_end = 7.5");
    let cfg2 = write_config(dir.path(), "restart.cfg", &restart);
    let second = dir.path().join("second");
    let out = sqgfront(&["simulate", "--config", &cfg2, "--out-dir", second.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(second.join("diagnostics.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("0,2.5,"));
    assert!(csv.lines().last().unwrap().contains(",7.5,"));
}

#[test]
fn guard_violation_exits_with_numerical_status() {
    let dir = tempfile::tempdir().unwrap();
    let text = "N = 256\nL = 64\nwidth = 5\nt_end = 60\ndt = 0.25\noutput_stride = 8\n";
    let cfg = write_config(dir.path(), "tiny.cfg", text);
    let out_dir = dir.path().join("out");
    let out = sqgfront(&["simulate", "--config", &cfg, "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "aborted");
    assert!(manifest["abort"]["last_good_time"].as_f64().unwrap() < 60.0);
    assert!(std::fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap().lines().count() >= 2);
}

#[test]
fn config_errors_exit_with_validation_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "dtt = 0.1\n");
    let out = sqgfront(&["simulate", "--config", &cfg, "--out-dir", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("dtt") && err.contains("`dt`"), "{err}");
    let missing = sqgfront(&["simulate", "--config", "/nonexistent.cfg", "--out-dir", "/tmp/x"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn symbol_check_prints_pass_rows() {
    let out = sqgfront(&["symbol-check", "--n", "1", "--trials", "100", "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.ends_with(",PASS")).count(), 100);
}

#[test]
fn coeffs_lists_leading_values() {
    let out = sqgfront(&["coeffs", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "1,1,-0.5,0.5"));
}

#[test]
fn json_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("energy.json");
    let out = sqgfront(&["energy-report", "--order", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["energies"].as_array().unwrap().len(), 3);
    assert!(v["tblog_norm"].as_f64().unwrap() < 2.0);

    let steep = sqgfront(&["energy-report", "--amplitude", "100", "--width", "10", "--length", "200"]);
    assert_eq!(steep.status.code(), Some(2));

    let oracle = sqgfront(&["oracle-check", "--fields", "3"]);
    assert_eq!(oracle.status.code(), Some(0), "{}", String::from_utf8_lossy(&oracle.stderr));
    let v: Value = serde_json::from_slice(&oracle.stdout).unwrap();
    assert_eq!(v["checks"]["trilinear_relative_gap"]["pass"], true);
}

#[test]
fn decay_and_scatter_phase_tables() {
    let out = sqgfront(&["decay-study", "--n-points", "4096", "--length", "2000", "--samples", "12"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t[time],linf[amplitude],fitted_exponent[1]\n"));
    assert_eq!(text.lines().count(), 13);

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.cfg", SMALL_RUN);
    let out = sqgfront(&["scatter-phase", "--config", &cfg, "--modes", "8,16"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t[time],k[count],xi[wavenumber],arg_h[rad],arg_v[rad]\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 6);
    assert!(String::from_utf8_lossy(&out.stderr).contains("increment ratio"));
}
