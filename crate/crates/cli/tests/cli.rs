use std::process::{Command, Output};

use serde_json::Value;

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify")).args(args).env_remove("VERIFY_THREADS").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn without_timing(mut v: Value) -> Value {
    for c in v["checks"].as_array_mut().unwrap() {
        c.as_object_mut().unwrap().remove("wall_ms");
    }
    v
}

#[test]
fn passing_suite_exits_zero_with_json() {
    let out = verify(&["coproduct"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["suite"], "coproduct");
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert_eq!(c["status"], "pass");
        assert!(c["certified"].as_u64().unwrap() > 0);
        for key in ["id", "anchor", "witness"] {
            assert!(c[key].is_string());
        }
    }
}

#[test]
fn json_is_deterministic_up_to_timing() {
    let a = without_timing(json(&verify(&["pseudo", "--seed", "3"])));
    let b = without_timing(json(&verify(&["pseudo", "--seed", "3", "--threads", "2"])));
    assert_eq!(a, b);
}

#[test]
fn narrow_window_exits_three() {
    let out = verify(&["heisenberg", "--window", "0:0"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["status"] == "undecidable"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(verify(&["nope"]).status.code(), Some(2));
    assert_eq!(verify(&["pseudo", "--window", "3:1"]).status.code(), Some(2));
    assert_eq!(verify(&["pseudo", "--lattice", "/nonexistent.json"]).status.code(), Some(2));
    assert_ne!(verify(&["pseudo", "--format", "xml"]).status.code(), Some(0));
}

#[test]
fn text_format() {
    let out = verify(&["modules", "--format", "text", "--lattice", "a1"]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("suite modules"));
    assert!(s.trim_end().ends_with("overall: pass"));
}

#[test]
fn threads_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_verify")).args(["coproduct"]).env("VERIFY_THREADS", "1").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_verify")).args(["coproduct"]).env("VERIFY_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn threads_flag_wins_over_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_verify"))
        .args(["coproduct", "--threads", "1"])
        .env("VERIFY_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
