//! End-to-end runs of the `linfty` binary.

use std::process::Command;
use std::sync::OnceLock;

use linfty_core::space::{parse_cochain, CochainJson, GradedSpace};
use serde_json::Value;

fn linfty(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_linfty"))
        .args(args)
        .env_remove("LINFTY_COLOR")
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, out, err) = linfty(&full);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\nstdout: {out}\nstderr: {err}"));
    (code, v)
}

fn schema() -> &'static jsonschema::JSONSchema {
    static SCHEMA: OnceLock<Value> = OnceLock::new();
    static COMPILED: OnceLock<jsonschema::JSONSchema> = OnceLock::new();
    let s = SCHEMA.get_or_init(|| serde_json::from_str(include_str!("../schema/output.v1.json")).unwrap());
    COMPILED.get_or_init(|| jsonschema::JSONSchema::compile(s).expect("schema compiles"))
}

fn assert_valid(doc: &Value) {
    let s = schema();
    if let Err(errors) = s.validate(doc) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("schema violations: {msgs:?}\n{doc:#}");
    }
}

const D2: &str = "ps[1,1,0;1]*a + ps[2,0,0;3]*b + ps[0,1,1;3]*c";

#[test]
fn bracket_example_matches_semantically() {
    let (code, out, _) = linfty(&["bracket", "--degrees", "0,-1,1", "--grading", "Z", D2, "same"]);
    assert_eq!(code, 0);
    let sp = GradedSpace::z(&[0, -1, 1]);
    let got = parse_cochain(out.trim(), &sp).unwrap();
    let want = parse_cochain("ph[2,1,0;3]*(2*b*(2*a-c))", &sp).unwrap();
    assert!(got.sub(&want).is_zero(), "got {out}");
}

#[test]
fn classify_example() {
    let (code, v) = json(&["classify", "--profile", "twobar1_012", "ps[1,0,1;2]"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["label"], "first_kind(2)");
    assert_eq!(v["result"]["order"], 2);
    assert_valid(&v);
}

#[test]
fn usage_errors_exit_2_with_grammar() {
    let (code, _, err) = linfty(&["bracket"]);
    assert_eq!(code, 2);
    assert!(err.contains("Expression grammar"));
    let (code, _, err) = linfty(&["reproduce", "nosuchsuite"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown suite"));
    let (code, _, err) = linfty(&["bracket", "--degrees", "0,-1,1", "ps[1,1;1]", "same"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn domain_errors_exit_1() {
    let (code, _, err) = linfty(&["cohomology", "--degrees", "0,-1,1", "--d", "ps[1,1,0;1]*a", "--n", "1", "--s", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains('a'), "{err}");
    let (code, _, err) = linfty(&[
        "identify", "--profile", "onebar2_x0", "--base", "d_5(1:1/2)", "--bind", "t3=1,t4=1,t5=1,s5=2,s6=1",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("unknown parameter `s5`"), "{err}");
}

#[test]
fn json_cochains_round_trip() {
    let sp = GradedSpace::z(&[0, -1, 1]);
    for args in [
        vec!["bracket", "--degrees", "0,-1,1", D2, "same"],
        vec!["bracket", "--degrees", "0,-1,1", "ps[2,0,0;3]*(1/3)", "ps[0,1,1;3]*x - ps[1,1,0;1]"],
        vec!["act", "--degrees", "0,-1,1", "--auto", "2,0,0;0,1,0;0,0,3", "ps[1,1,0;1] + ps[2,0,0;3]"],
        vec!["expad", "--degrees", "0,-1,1", "--gen", "ph[2,0,0;1]*t", "--cutoff", "3", "ps[1,1,0;1]"],
    ] {
        let (code, v) = json(&args);
        assert_eq!(code, 0, "{args:?}");
        assert_valid(&v);
        let cj: CochainJson = serde_json::from_value(v["result"]["cochain"].clone()).unwrap();
        let from_json = cj.to_coderivation(&sp).unwrap();
        let from_text = parse_cochain(v["result"]["text"].as_str().unwrap(), &sp).unwrap();
        assert!(from_json.sub(&from_text).is_zero(), "{args:?}");
    }
}

#[test]
fn documents_validate_against_schema() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["cohomology", "--degrees", "0,-1,1", "--d", "ps[1,1,0;1] + ps[2,0,0;3] + ps[0,1,1;3]*2", "--n", "2", "--s", "1"],
        vec!["cohomology", "--degrees", "0,-1,1", "--d", "ps[1,1,0;1]", "--range", "1..3", "--s", "1"],
        vec!["cobmatrix", "--degrees", "0,-1,1", "--d", "ps[1,1,0;1]*lambda + ps[0,1,1;3]*mu", "--l", "2", "--s", "1"],
        vec!["deform", "--profile", "onebar2_x0", "--base", "d_2*"],
        vec!["obstruction", "--degrees", "0,-1,1", "--d", "ps[1,1,0;1]", "--n", "2"],
        vec!["identify", "--profile", "onebar2_x0", "--base", "d_3(1:1/2)", "--bind", "t2=0"],
        vec!["equiv", "--profile", "twobar1_m2m10", "--grading", "Z2", "ps[1,0,1;1] + ps[0,1,1;2]*2", "ps[1,0,1;1]*2 + ps[0,1,1;2]"],
        vec!["report", "--profile", "twobar1_012", "--kmax", "2"],
        vec!["reproduce", "blocks"],
    ];
    for args in runs {
        let (code, v) = json(&args);
        assert!(code <= 1, "{args:?}");
        assert_eq!(v["schema_version"], 1);
        assert_valid(&v);
    }
}

#[test]
fn deterministic_given_seed() {
    let a = linfty(&["--seed", "11", "reproduce", "blocks"]);
    let b = linfty(&["--seed", "11", "reproduce", "blocks"]);
    assert_eq!(a, b);
    let a = linfty(&["--format", "json", "report", "--profile", "onebar2_x0", "--kmax", "2"]);
    let b = linfty(&["--format", "json", "report", "--profile", "onebar2_x0", "--kmax", "2"]);
    assert_eq!(a, b);
}

#[test]
fn every_suite_reproduces() {
    for suite in linfty_cli::suites::SUITES {
        let (code, out, err) = linfty(&["reproduce", suite]);
        assert_eq!(code, 0, "{suite}\n{out}\n{err}");
        assert!(out.contains("0 failure(s)"));
    }
}

#[test]
fn color_is_opt_in() {
    let out = Command::new(env!("CARGO_BIN_EXE_linfty"))
        .args(["reproduce", "blocks"])
        .env("LINFTY_COLOR", "1")
        .output()
        .unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("\x1b[32mPASS"));
    let (_, plain, _) = linfty(&["reproduce", "blocks"]);
    assert!(!plain.contains('\x1b'));
}
