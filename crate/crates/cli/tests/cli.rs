//! End-to-end tests against the built binary: exit code contract and
//! byte-level determinism of reports.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moserlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn moserlab")
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("moserlab-test-{}-{}", std::process::id(), name));
    std::fs::write(&path, contents).unwrap();
    path
}

const CONFIG: &str = r#"
seed = 42

[domain]
shape = "unit-square"
a_faces = ["all"]
t_final = 1.0

[grid]
n = 16
nt = 8

[chain]
dimension = 2
tbar = 1.6

[problem]
source = "constant"
amplitude = 1.0
alpha = 9.0
"#;

#[test]
fn params_prints_chain_and_exits_zero() {
    let out = run(&["params", "--N", "2", "--tbar", "1.6"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["r"].as_f64().unwrap() - 7.0).abs() < 1e-9);
    assert!((v["tstar"].as_f64().unwrap() - 8.0).abs() < 1e-9);
}

#[test]
fn params_rejects_bad_tbar_with_exit_one() {
    let out = run(&["params", "--N", "2", "--tbar", "3.5"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("FAIL"));
}

#[test]
fn verify_all_passes() {
    let out = run(&["verify", "--suite", "all"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["all_passed"], serde_json::Value::Bool(true));
}

#[test]
fn verify_unknown_suite_is_a_usage_error() {
    let out = run(&["verify", "--suite", "everything"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_config_file_exits_two() {
    let bad = write_temp("bad.toml", "not toml [");
    let out = run(&["solve", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["bound", "--config", "/nonexistent/moserlab.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_reports_small_weak_residual() {
    let cfg = write_temp("run.toml", CONFIG);
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"].as_u64(), Some(42));
    assert!(v["max_weak_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    let cfg = write_temp("det.toml", CONFIG);
    for cmd in ["bound", "report"] {
        let a = run(&[cmd, "--config", cfg.to_str().unwrap(), "--seed", "7"]);
        let b = run(&[cmd, "--config", cfg.to_str().unwrap(), "--seed", "7"]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{cmd} output not deterministic");
    }
}

#[test]
fn seed_is_recorded_in_reports() {
    let cfg = write_temp("seed.toml", CONFIG);
    let out = run(&["bound", "--config", cfg.to_str().unwrap(), "--seed", "123"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"].as_u64(), Some(123));
}

#[test]
fn weight_csv_has_expected_header() {
    let out = run(&["weight", "--N", "2", "--k-max", "6", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().next().unwrap();
    assert_eq!(first, "k,log2_ratio,lower_bound,margin");
}
