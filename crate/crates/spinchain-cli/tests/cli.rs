//! End-to-end checks of the `spinchain` binary: spec ingestion, verdict
//! round trips, deterministic output, and error reporting.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinchain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("spinchain-cli-{name}-{}", std::process::id()))
}

#[test]
fn test_construct_build_round_trip_spectrum() {
    let out = run(&["construct", "hahn", "--n", "4"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let spec_path = temp_path("hahn4.json");
    fs::write(&spec_path, stdout(&out)).unwrap();

    let built = run(&["build", "--spec", spec_path.to_str().unwrap(), "--json"]);
    assert!(built.status.success(), "{}", stderr(&built));
    let value: serde_json::Value = serde_json::from_str(&stdout(&built)).unwrap();
    let eigenvalues: Vec<f64> = value["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let expected = [0.0, -2.0, -6.0, -12.0];
    assert_eq!(eigenvalues.len(), expected.len());
    for (got, want) in eigenvalues.iter().zip(expected) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
    fs::remove_file(&spec_path).ok();
}

#[test]
fn test_two_site_field_free_build() {
    let spec_path = temp_path("two-site.json");
    fs::write(&spec_path, r#"{"model":"heisenberg","couplings":[1.0]}"#).unwrap();
    let built = run(&["build", "--spec", spec_path.to_str().unwrap(), "--json"]);
    assert!(built.status.success(), "{}", stderr(&built));
    let value: serde_json::Value = serde_json::from_str(&stdout(&built)).unwrap();
    let eigenvalues = value["eigenvalues"].as_array().unwrap();
    assert!((eigenvalues[0].as_f64().unwrap() - 0.0).abs() < 1e-12);
    assert!((eigenvalues[1].as_f64().unwrap() + 2.0).abs() < 1e-12);
    fs::remove_file(&spec_path).ok();
}

#[test]
fn test_certify_accepts_build_output_with_identical_verdicts() {
    let spec_path = temp_path("hahn6.json");
    let built_path = temp_path("hahn6-built.json");
    let out = run(&["construct", "hahn", "--n", "6"]);
    fs::write(&spec_path, stdout(&out)).unwrap();
    let built = run(&["build", "--spec", spec_path.to_str().unwrap(), "--json"]);
    fs::write(&built_path, stdout(&built)).unwrap();

    let flags = ["--centrosymmetry", "--pst", "--revival", "--tol", "1e-8"];
    let from_spec = run(
        &[&["certify", "--spec", spec_path.to_str().unwrap()], &flags[..]].concat(),
    );
    let from_build = run(
        &[&["certify", "--spec", built_path.to_str().unwrap()], &flags[..]].concat(),
    );
    assert!(from_spec.status.success(), "{}", stderr(&from_spec));
    assert!(from_build.status.success(), "{}", stderr(&from_build));
    assert_eq!(stdout(&from_spec), stdout(&from_build));

    // The quadratic chain revives at pi (even gaps) but cannot transfer.
    let value: serde_json::Value = serde_json::from_str(&stdout(&from_spec)).unwrap();
    assert_eq!(value["centrosymmetric"], serde_json::json!(true));
    assert_eq!(value["revival"]["holds"], serde_json::json!(true));
    assert_eq!(value["pst"]["holds"], serde_json::json!(false));

    fs::remove_file(&spec_path).ok();
    fs::remove_file(&built_path).ok();
}

#[test]
fn test_certify_pgst_spectrum_verdict() {
    let out = run(&["certify", "--spectrum", "0,-2,-6", "--pgst"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["pgst"]["holds"], serde_json::json!(false));
    let witness: Vec<&str> = value["pgst"]["witness"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(witness, ["2", "-3", "1"]);
}

#[test]
fn test_malformed_spec_fails_with_diagnostic() {
    let spec_path = temp_path("broken.json");
    fs::write(&spec_path, "{\"model\": \"heisenberg\",\n  \"couplings\": [1.0,]}").unwrap();
    let out = run(&["build", "--spec", spec_path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("line"), "diagnostic lacks position info: {err}");
    fs::remove_file(&spec_path).ok();
}

#[test]
fn test_invalid_chain_spec_fails() {
    let spec_path = temp_path("negative-coupling.json");
    fs::write(&spec_path, r#"{"model":"exchange","couplings":[1.0,-0.5]}"#).unwrap();
    let out = run(&["build", "--spec", spec_path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("coupling"), "unexpected: {}", stderr(&out));
    fs::remove_file(&spec_path).ok();
}

#[test]
fn test_plan_sixteen_reports_horizon_without_evaluation() {
    let out = run(&["plan", "--n", "16", "--epsilon", "1e-5", "--evaluate"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("evaluation skipped"), "{}", stderr(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["evaluation"], serde_json::Value::Null);
    let t: u128 = value["t_over_pi"].as_str().unwrap().parse().unwrap();
    assert!(t > 10u128.pow(17), "t/pi = {t}");
}

#[test]
fn test_plan_infeasible_is_data_not_error() {
    let out = run(&["plan", "--n", "3", "--epsilon", "1e-3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(value["infeasible"].is_string(), "{value}");
}

#[test]
fn test_deterministic_outputs() {
    let first = run(&["plan", "--n", "4", "--epsilon", "1e-3", "--evaluate"]);
    let second = run(&["plan", "--n", "4", "--epsilon", "1e-3", "--evaluate"]);
    assert!(first.status.success());
    assert_eq!(stdout(&first), stdout(&second));

    let dir_a = temp_path("figs-a");
    let dir_b = temp_path("figs-b");
    for dir in [&dir_a, &dir_b] {
        let out = run(&["figures", "--fig1", "4", "--out-dir", dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let csv_a = fs::read(dir_a.join("fig1.csv")).unwrap();
    let csv_b = fs::read(dir_b.join("fig1.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    let meta_a = fs::read(dir_a.join("fig1.meta.json")).unwrap();
    let meta_b = fs::read(dir_b.join("fig1.meta.json")).unwrap();
    assert_eq!(meta_a, meta_b);
    fs::remove_dir_all(&dir_a).ok();
    fs::remove_dir_all(&dir_b).ok();
}

#[test]
fn test_figures_creates_missing_directory() {
    let dir = temp_path("nested").join("deeper");
    let out = run(&["figures", "--fig2", "4", "--out-dir", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.join("fig2.csv")).unwrap();
    assert!(csv.starts_with("a,max_fidelity,argmax_t\n"));
    assert!(csv.lines().count() > 2);
    fs::remove_dir_all(dir.parent().unwrap()).ok();
}

#[test]
fn test_sweep_two_site_csv() {
    let spec_path = temp_path("sweep-two-site.json");
    fs::write(&spec_path, r#"{"model":"exchange","couplings":[1.0]}"#).unwrap();
    let out = run(&[
        "sweep",
        "--spec",
        spec_path.to_str().unwrap(),
        "--t-max",
        "1.5707963267948966",
        "--points",
        "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,fidelity"));
    let last = lines.last().unwrap();
    let fid: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((fid - 1.0).abs() < 1e-12, "fidelity at quarter period: {fid}");
    fs::remove_file(&spec_path).ok();
}
