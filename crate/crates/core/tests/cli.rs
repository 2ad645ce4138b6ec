//! The `qpi` binary: exit codes, output formats and the shipped model zoo.

use std::path::PathBuf;
use std::process::{Command, Output};

use qpi::model::{load_model, parse_model};

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models")
}

fn model(name: &str) -> String {
    models().join(format!("{name}.json")).to_string_lossy().into_owned()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn qpi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpi"))
        .arg("--quiet")
        .args(args)
        .env_remove("QPI_CONFIG")
        .output()
        .expect("run qpi")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn zoo_files_load() {
    for name in ["example-2d", "example-2d-r", "example-3d", "trivial-eps", "winding-ref", "random-4", "random-6"] {
        let m = load_model(models().join(format!("{name}.json")).as_path()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(m.name, name);
        let back = parse_model(&serde_json::to_string(&m.to_json()).unwrap(), "x").unwrap();
        assert_eq!(back.to_json(), m.to_json(), "{name} round trip");
    }
    let m = load_model(models().join("example-2d.json").as_path()).unwrap();
    assert_eq!(m.size(), 6);
    let m = load_model(models().join("example-3d.json").as_path()).unwrap();
    assert_eq!(m.family_kind(), "suspension");
}

#[test]
fn ktable_verifies_and_dumps() {
    let out = qpi(&["ktable", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
    let out = qpi(&["ktable", "--dump"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert!(text.starts_with("class,K0,"));
}

#[test]
fn trivial_verify_passes_and_is_byte_stable() {
    let a = qpi(&["verify", "--model", &model("trivial-eps")]);
    assert_eq!(a.status.code(), Some(0));
    let v = json(&a);
    assert_eq!(v["pass"], true);
    assert_eq!(v["boundary"]["values"], serde_json::json!([0, 0, 0, 0]));
    assert_eq!(v["indicator"]["mu"], 0);
    assert!(v.get("timings").is_none());
    let b = Command::new(env!("CARGO_BIN_EXE_qpi"))
        .args(["--quiet", "verify", "--model", &model("trivial-eps")])
        .env("QPI_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn indicator_matches_the_example() {
    let out = qpi(&["indicator", "--model", &model("example-2d")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["mu"], 2);
    assert_eq!(v["half_mu"], 1);
    let minus: Vec<i64> = v["entries"].as_array().unwrap().iter().map(|e| e["n_minus"].as_i64().unwrap()).collect();
    assert_eq!(minus, [3, 1, 1, 1]);
}

#[test]
fn symmetry_errors_are_input_errors() {
    // chiral operator equal to the inversion: they commute instead of anticommuting
    let text = std::fs::read_to_string(model("trivial-eps")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["symmetry"]["chiral"] = v["symmetry"]["inversion"].clone();
    let path = tmp("commuting.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let p = path.to_string_lossy();
    let out = qpi(&["check-symmetry", "--model", &p]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["ok"], false);
    assert_eq!(qpi(&["verify", "--model", &p]).status.code(), Some(3));
    assert_eq!(qpi(&["verify", "--model", "/nonexistent.json"]).status.code(), Some(3));
    assert_eq!(qpi(&["verify"]).status.code(), Some(3));
}

#[test]
fn spectrum_of_constant_model_is_flat() {
    let path = tmp("eps.csv");
    let out = qpi(&["spectrum", "--model", &model("trivial-eps"), "--edge", "1", "--L", "4", "--momenta", "8", "--out", &path.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param,index,energy"));
    let energies: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(energies.len(), 8 * 6 * 4);
    assert!(energies.iter().all(|e| (e.abs() - 1.0).abs() < 1e-12));
}

#[test]
fn ribbon_row_count() {
    let path = tmp("ribbon.csv");
    let out = qpi(&["spectrum", "--model", &model("example-2d"), "--edge", "1", "--L", "8", "--out", &path.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count() - 1, 128 * 6 * 8);
}

#[test]
fn factorize_dumps_coefficients() {
    let path = tmp("coeffs.json");
    let out = qpi(&["factorize", "--model", &model("example-2d"), "--var", "z", "--freeze", "w=1", "--dump-coeffs", &path.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["partial_indices"]["canonical"], true);
    let dump: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let plus = dump["plus_coeffs"].as_array().unwrap();
    assert!(!plus.is_empty());
    assert_eq!(plus[0].as_array().unwrap().len(), 6);
    assert_eq!(qpi(&["factorize", "--model", &model("example-2d"), "--freeze", "z=1"]).status.code(), Some(3));
}

#[test]
fn gap_check_certifies_the_example() {
    let out = qpi(&["gap-check", "--model", &model("example-2d")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["entries"].as_array().unwrap().len(), 4);
    assert_eq!(v["all_invertible"], true);
}
