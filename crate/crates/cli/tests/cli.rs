use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    root.to_str().unwrap().to_owned()
}

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fredholm-lab"))
        .args(args)
        .env_remove("FREDHOLM_LAB_SEED")
        .output()
        .expect("run fredholm-lab")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn index_of_a_pair() {
    let out = lab(&["index", &fixture("pair.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["kind"], "pair");
    assert_eq!(v["index"], 0);
}

#[test]
fn index_of_an_operator_pair() {
    let out = lab(&["index", &fixture("operator_identity.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["index"], -1);
    assert_eq!(v["formula"]["passed"], true);
}

#[test]
fn inconsistent_dimension_is_an_input_error() {
    let out = lab(&["index", &fixture("bad_dim.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dim"));
}

#[test]
fn missing_file_is_an_input_error() {
    assert_eq!(lab(&["index", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn winding_from_files() {
    let out = lab(&["winding", &fixture("phase_loop.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["winding"], 1);

    let out = lab(&["winding", &fixture("rotating_line.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["winding"], 1);

    assert_eq!(lab(&["winding", &fixture("open_loop.json")]).status.code(), Some(1));
}

#[test]
fn builtin_loops_and_refinement() {
    let out = lab(&["winding", "--builtin", "phase", "--samples", "4", "--w", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["winding"], 2);
    assert_eq!(v["refined"], true);

    let out = lab(&["winding", "--builtin", "phase", "--samples", "4", "--w", "2", "--refine-max", "0"]);
    assert_eq!(out.status.code(), Some(1));

    let out = lab(&["winding", "--builtin", "rotating-line", "--w", "-3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() > 2);
}

#[test]
fn verify_passes_and_locates_injected_faults() {
    let out = lab(&["verify", "--trials", "10", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["seed"], 5);

    let out = lab(&["verify", "--trials", "10", "--seed", "5", "--suite", "grassmann", "--fault-inject", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["failed_trials"], 1);
    assert_eq!(v["failures"][0]["trial"], 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("trial 3"));
}

#[test]
fn seed_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fredholm-lab"))
        .args(["verify", "--trials", "2", "--suite", "symplectic"])
        .env("FREDHOLM_LAB_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 99);
}

#[test]
fn invalid_arguments() {
    assert_eq!(lab(&["verify", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(lab(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lab(&["--tol-gap", "-1", "verify"]).status.code(), Some(2));
}

#[test]
fn report_to_a_file() {
    let dir = std::env::temp_dir().join(format!("fredholm-lab-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = lab(&["--out", path.to_str().unwrap(), "index", &fixture("pair.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["index"], 0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn index_of_a_nested_pair_with_defect() {
    let out = lab(&["index", &fixture("nested.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!((v["dim_k"].as_i64(), v["dim_k_prime"].as_i64()), (Some(1), Some(0)));
    assert_eq!(v["index"], 0);
    assert_eq!(v["formula"]["passed"], true);
}
