use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_stringar");

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("STRINGAR_OUTPUT_DIR").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn u_witness_reports_depth_seven() {
    let v = json(&["witness", "--family", "U", "--m", "2", "--n", "3", "--json"]);
    assert_eq!(v["expectedDepth"], 7);
    assert_eq!(v["verified"], true);
}

#[test]
fn audit_is_byte_identical_across_runs() {
    let args = ["audit", "--family", "W", "--n", "3", "--samples", "32", "--seed", "7", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn knit_dot_census() {
    let dir = tempdir();
    let out = Command::new(BIN)
        .args(["knit", "--family", "W", "--n", "3", "--dot", "--output", "w3.dot"])
        .env("STRINGAR_OUTPUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let dot = std::fs::read_to_string(dir.join("w3.dot")).unwrap();
    let edges = dot.lines().filter(|l| l.contains("->") && !l.contains("dotted")).count();
    let tau = dot.lines().filter(|l| l.contains("dotted")).count();
    assert_eq!((edges, tau), (16, 8));
    std::fs::remove_dir_all(dir).unwrap();
}

fn tempdir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("stringar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["strings"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["strings", "--family", "W", "--n", "3", "--bogus"]).status.code(), Some(3));
    assert_eq!(run(&["strings", &data("ex3.alg"), "--family", "W", "--n", "3"]).status.code(), Some(3));
    assert_eq!(run(&["--char", "4", "knit", "--family", "W", "--n", "3"]).status.code(), Some(3));
    let banded = run(&["strings", &data("ex3.alg"), "--json"]);
    assert_eq!(banded.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&banded.stdout).unwrap();
    assert_eq!(v["error"]["code"], "band-found");
    assert_eq!(run(&["tau", "--family", "W", "--n", "3", "--word", "b1^- a b1"]).status.code(), Some(1));
    assert_eq!(run(&["witness", "--family", "W", "--n", "1"]).status.code(), Some(1));
}

#[test]
fn detect_reports_the_pattern_and_band() {
    let v = json(&["detect", &data("ex3.alg"), "--json"]);
    let pats = v["patterns"].as_array().unwrap();
    assert!(pats.iter().any(|p| p["pattern"] == "Q3" && p["m"] == 2), "{v}");
    assert!(v["band"].is_string());
}

#[test]
fn degree_and_counting_quiver_agree() {
    let d = json(&["degree", "--family", "U", "--m", "3", "--n", "2", "--vertex", "a3", "--side", "left", "--json"]);
    let cg = json(&["cg-quiver", "--family", "U", "--m", "3", "--n", "2", "--vertex", "a3", "--side", "ending", "--json"]);
    assert_eq!(d["degree"], 4);
    assert_eq!(cg["degree"], 4);
}

#[test]
fn prime_field_matches_rationals() {
    let a = json(&["radical-profile", "--family", "W", "--n", "3", "--json"]);
    let b = json(&["--char", "32003", "radical-profile", "--family", "W", "--n", "3", "--json"]);
    assert_eq!(a, b);
}

#[test]
fn presentation_file_commands() {
    let v = json(&["validate", &data("loop_in.alg"), "--json"]);
    assert_eq!(v["is_string_algebra"], true);
    let o = json(&["tau-orbit", &data("loop_in.alg"), "--word", "be", "--steps", "3", "--json"]);
    let orbit = o["orbit"].as_array().unwrap();
    assert_eq!(orbit.len(), 4);
    assert_eq!(orbit[0], orbit[3]);
    let h = json(&["hom", &data("loop_in.alg"), "--from", "be", "--to", "be", "--json"]);
    assert!(h["dimension"].as_u64().unwrap() >= 1);
    let f = run(&["family", "--family", "V", "--m", "2", "--n", "1"]);
    assert!(String::from_utf8_lossy(&f.stdout).contains("arrow a a2 -> w"));
}
