use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

use alpha_mi::cli::digest;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_alpha-mi"))
}

fn input(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str], path: &Path) -> Output {
    bin().args(args).arg("--input").arg(path).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn values(report: &Value) -> Vec<(String, Option<f64>)> {
    report["measures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| (m["measure"].as_str().unwrap().to_string(), m["value"].as_f64()))
        .collect()
}

const BSC: &str = r#"{"prior":[0.5,0.5],"channel":[[0.9,0.1],[0.1,0.9]]}"#;

#[test]
fn digest_matches_input_bytes() {
    let f = input(BSC);
    let report = json(&run(&["measure", "--alpha", "2"], f.path()));
    let bytes = std::fs::read(f.path()).unwrap();
    assert_eq!(report["input_digest"], digest(&bytes));
    assert_eq!(report["tool"], "alpha-mi");
    assert_eq!(report["config"]["units"], "nats");
}

#[test]
fn joint_and_factored_inputs_agree() {
    let a = json(&run(&["measure", "--alpha", "1.5"], input(BSC).path()));
    let j = input(r#"{"joint":[[0.45,0.05],[0.05,0.45]]}"#);
    let b = json(&run(&["measure", "--alpha", "1.5"], j.path()));
    for ((m, x), (_, y)) in values(&a).iter().zip(values(&b)) {
        assert!((x.unwrap() - y.unwrap()).abs() < 1e-12, "{m}");
    }
}

#[test]
fn uniform_identity_gives_log_n() {
    let f = input(
        r#"{"prior":[0.25,0.25,0.25,0.25],
            "channel":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}"#,
    );
    let report = json(&run(&["measure", "--alpha", "2"], f.path()));
    for (m, v) in values(&report) {
        assert!((v.unwrap() - 4f64.ln()).abs() < 1e-6, "{m}: {v:?}");
    }
}

#[test]
fn lp_flagged_below_half() {
    let report = json(&run(&["measure", "--alpha", "0.4"], input(BSC).path()));
    let lp = report["measures"].as_array().unwrap().iter().find(|m| m["measure"] == "lp").unwrap();
    assert!(lp["value"].is_null());
    assert!(lp["unavailable"].is_string());
}

#[test]
fn bits_divide_by_log_two() {
    let f = input(BSC);
    let nats = json(&run(&["measure", "--alpha", "3"], f.path()));
    let bits = json(&run(&["measure", "--alpha", "3", "--units", "bits"], f.path()));
    for ((m, n), (_, b)) in values(&nats).iter().zip(values(&bits)) {
        assert!((n.unwrap() / 2f64.ln() - b.unwrap()).abs() < 1e-12, "{m}");
    }
}

#[test]
fn single_step_sweep_equals_measure() {
    let f = input(BSC);
    let measure = json(&run(&["measure", "--alpha", "0.7"], f.path()));
    let out = run(&["sweep", "--alpha-start", "0.7", "--alpha-end", "0.7", "--steps", "1"], f.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1);
    let sweep: Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(values(&sweep), values(&measure));
}

#[test]
fn sweep_on_independent_input_is_zero() {
    let f = input(r#"{"prior":[0.3,0.7],"channel":[[0.2,0.8],[0.2,0.8]]}"#);
    let out = run(&["sweep", "--alpha-start", "0.5", "--alpha-end", "2", "--steps", "4"], f.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    for line in text.lines() {
        let report: Value = serde_json::from_str(line).unwrap();
        for (m, v) in values(&report) {
            // LP is unavailable at the order 1/2 endpoint
            assert!(v.map_or(m == "lp", |v| v.abs() < 1e-9), "{m}");
        }
    }
}

#[test]
fn reports_are_reproducible() {
    let f = input(BSC);
    let a = run(&["leakage", "--alpha", "1.7"], f.path());
    let b = run(&["leakage", "--alpha", "1.7"], f.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn leakage_residuals_are_small() {
    let f = input(r#"{"prior":[0.2,0.5,0.3],"channel":[[0.7,0.2,0.1],[0.1,0.6,0.3],[0.3,0.3,0.4]]}"#);
    let doc = json(&run(&["leakage", "--alpha", "2.5"], f.path()));
    let entries = doc["representations"].as_array().unwrap();
    assert_eq!(entries.len(), 15);
    for e in entries {
        assert!(e["residual"].as_f64().unwrap() < 1e-5, "{e}");
    }
}

#[test]
fn exit_codes() {
    let code = |out: Output| out.status.code().unwrap();
    let f = input(BSC);
    assert_eq!(code(run(&["leakage", "--alpha", "0.4", "--representations", "lp-score"], f.path())), 2);
    assert_eq!(code(run(&["measure", "--alpha=-1"], f.path())), 2);
    assert_eq!(code(run(&["measure", "--alpha", "2", "--measures", "renyi"], f.path())), 64);
    let bad = input(r#"{"prior":[0.5,0.6],"channel":[[1,0],[0,1]]}"#);
    assert_eq!(code(run(&["measure", "--alpha", "2", "--strict-normalization"], bad.path())), 2);
    assert_eq!(code(run(&["measure", "--alpha", "2"], bad.path())), 0);
    assert_eq!(code(run(&["measure", "--alpha", "2"], input("{not json").path())), 2);
    assert_eq!(code(run(&["measure", "--alpha", "2"], input(r#"{"prior":[1]}"#).path())), 2);
    assert_eq!(code(run(&["measure", "--alpha", "2"], Path::new("/nonexistent/input.json"))), 2);
    assert_eq!(code(bin().args(["verify", "--trials", "0"]).output().unwrap()), 64);
    assert_eq!(code(bin().arg("frobnicate").output().unwrap()), 64);
    assert_eq!(code(bin().arg("--help").output().unwrap()), 0);
}

#[test]
fn verify_catches_injected_fault() {
    let out = bin()
        .args(["verify", "--trials", "2", "--seed", "7", "--inject-fault", "wrong-tilt-order"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("sibson_entropy_difference"), "{stderr}");
    assert!(stderr.contains("replay with --seed"), "{stderr}");
}
