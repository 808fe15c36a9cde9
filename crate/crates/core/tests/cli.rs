use std::path::PathBuf;
use std::process::Command;

use finmok::cli::{run_with, EXIT_DATA, EXIT_NEGATIVE, EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE};
use finmok::json::{certificate_from_doc, VerdictDoc};
use finmok::semantics::validate_model;

const CHAIN: &str = r#"{"schema": 1, "n": 1, "worlds": ["w", "v"], "relations": {"1": [["w", "v"]]}}"#;

const SHRINKING: &str = r#"{
  "schema": 1,
  "frame": {"n": 1, "worlds": ["w", "v"], "relations": {"1": [["w", "v"]]}},
  "domains": {"w": [0, 1], "v": [0]},
  "interp": {"P": {"w": [0], "v": []}},
  "domain_mode": "expanding",
  "equality_mode": "identity"
}"#;

fn file(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("finmok").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn parse_prints_the_formula() {
    let (code, out, _) = run(&["parse", "--formula", "x = y -> [1] x = y"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("monadic_with_equality"), "{out}");
}

#[test]
fn validate_reports_expanding_violation() {
    let model = file("shrinking.json", SHRINKING);
    let (code, out, _) = run(&["validate", "--model", model.to_str().unwrap()]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.contains("expanding"), "{out}");
}

#[test]
fn decide_emits_a_certificate_that_reparses() {
    let frame = file("chain.json", CHAIN);
    let (code, out, _) = run(&[
        "decide",
        "--frame",
        frame.to_str().unwrap(),
        "--formula",
        "(forall x. [1] P(x)) -> [1] forall x. P(x)",
        "--domains",
        "expanding",
        "--equality",
        "identity",
    ]);
    assert_eq!(code, EXIT_NEGATIVE);
    let doc: VerdictDoc = serde_json::from_str(&out).unwrap();
    assert_eq!(doc.status, "countermodel");
    let cert = certificate_from_doc(&doc.certificate.unwrap()).unwrap();
    assert!(validate_model(&cert.model).is_empty());
    assert_eq!(cert.model.frame.world_name(cert.failing_world), "w");

    let (code, out, _) = run(&[
        "decide", "--frame", frame.to_str().unwrap(), "--formula", "x != y -> [1] x != y",
        "--equality", "identity", "--max-size", "3",
    ]);
    assert_eq!(code, EXIT_UNKNOWN, "{out}");
}

#[test]
fn non_monadic_input_is_a_data_error() {
    let frame = file("chain-nm.json", CHAIN);
    let (code, _, err) = run(&["decide", "--frame", frame.to_str().unwrap(), "--formula", "forall x. R(x, x)"]);
    assert_eq!(code, EXIT_DATA);
    assert!(!err.is_empty());
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["decide"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["decide", "--frame", "/nonexistent.json", "--formula", "T"]).0, EXIT_DATA);
}

#[test]
fn binary_exit_codes() {
    let frame = file("chain-bin.json", CHAIN);
    let status = Command::new(env!("CARGO_BIN_EXE_finmok"))
        .args(["decide", "--frame", frame.to_str().unwrap(), "--formula", "[1] F", "--equality", "none"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_NEGATIVE));
    let status = Command::new(env!("CARGO_BIN_EXE_finmok"))
        .args(["corpus"])
        .env("FINMOK_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&status.stdout));
}
