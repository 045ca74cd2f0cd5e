//! End-to-end behaviour of the `ebq` binary: exit codes, outputs, determinism, schema.

use serde_json::Value;
use std::process::{Command, Output};

fn ebq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ebq")).args(args).env_remove("EBQ_MAX_TERMS").output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn schema_lists_id_and_checks() {
    let out = ebq(&["schema"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["schema_id"], "ebq-report/1");
    let ids: Vec<&str> = v["check_ids"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    for id in ["special.theta_triple_product", "dybe.operator_form", "replr.full_match", "vertex.phi_phi"] {
        assert!(ids.iter().any(|x| x.starts_with(id)), "missing {id}");
    }
}

#[test]
fn reports_validate_against_printed_schema() {
    let schema = json_of(&ebq(&["schema"]))["json_schema"].clone();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let out = ebq(&["verify", "--suite", "special,modes,dybe", "--N", "1", "--samples", "2"]);
    let report = json_of(&out);
    let errors: Vec<String> = validator.iter_errors(&report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
    let mut broken = report.clone();
    broken["reports"][0]["check_id"] = Value::from("not.a.check");
    assert!(!validator.is_valid(&broken));
}

#[test]
fn eval_rmatrix_at_zero_is_permutation() {
    let out = ebq(&["eval-rmatrix", "--N", "1", "--u", "0", "--s", "0.37+0.06i"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let entries = v["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    for e in entries {
        let (row, col) = (&e["row"], &e["col"]);
        let want = if row[0] == col[1] && row[1] == col[0] { 1.0 } else { 0.0 };
        let (re, im) = (e["re"].as_f64().unwrap(), e["im"].as_f64().unwrap());
        assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12, "{e}");
    }
}

#[test]
fn eval_rmatrix_is_byte_identical() {
    let args = ["eval-rmatrix", "--N", "2", "--u", "0.3,0.05", "--s", "0.41", "1.17", "--prefactor", "rho0"];
    assert_eq!(ebq(&args).stdout, ebq(&args).stdout);
}

#[test]
fn verify_is_byte_identical_for_fixed_seed() {
    let args = ["verify", "--suite", "special,face", "--N", "1", "--seed", "11", "--samples", "2"];
    let (a, b) = (ebq(&args), ebq(&args));
    assert_eq!(a.stdout, b.stdout);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(a.stdout, ebq(&seq).stdout);
}

#[test]
fn passing_suite_exits_zero() {
    let out = ebq(&["verify", "--suite", "special", "--samples", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["params"]["n"], 2);
}

#[test]
fn failing_suite_exits_one_with_failures_first() {
    let out = ebq(&["verify", "--suite", "repLR", "--N", "2", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let reps = json_of(&out)["reports"].as_array().unwrap().clone();
    let first_pass = reps.iter().position(|r| r["pass"] == true || r["gate"] == false).unwrap();
    assert!(first_pass > 0);
    assert!(reps[first_pass..].iter().all(|r| r["pass"] == true || r["gate"] == false));
}

#[test]
fn invalid_input_exits_two() {
    assert_eq!(ebq(&["eval-rmatrix", "--q-re", "1.2", "--u", "0.1", "--s", "0.3", "0.9"]).status.code(), Some(2));
    assert_eq!(ebq(&["verify", "--suite", "dybe", "--N", "2", "--s", "0.3", "0.3"]).status.code(), Some(2));
    assert_eq!(ebq(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(ebq(&["verify", "--tol", "dybe"]).status.code(), Some(2));
    assert_eq!(ebq(&["eval-rmatrix", "--u", "abc", "--s", "0.3", "0.9"]).status.code(), Some(2));
    assert_eq!(ebq(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn truncation_budget_exhaustion_exits_three() {
    let out = Command::new(env!("CARGO_BIN_EXE_ebq"))
        .args(["eval-rmatrix", "--N", "1", "--q-re", "0.95", "--q-im", "0", "--u", "0.3", "--s", "0.4"])
        .env("EBQ_MAX_TERMS", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn tolerance_override_is_recorded() {
    let out = ebq(&["verify", "--suite", "special", "--samples", "1", "--tol", "special.bracket_odd=1e-3"]);
    let v = json_of(&out);
    assert_eq!(v["tol_overrides"]["special.bracket_odd"], 1e-3);
    let rep = v["reports"].as_array().unwrap().iter().find(|r| r["check_id"] == "special.bracket_odd").unwrap();
    assert_eq!(rep["tol"], 1e-3);
}
