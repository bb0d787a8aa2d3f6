use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const TWO_SYMBOL: &str = r#"{"d":2,"alphabet":["a","b"],"allowed":[["a",["a","a"]],["a",["b","b"]],["b",["a","b"]],["b",["b","a"]]]}"#;
const FULL: &str = r#"{"d":2,"alphabet":["a","b"],"forbidden":[]}"#;
const SAVING: &str = r#"{"d":2,"alphabet":["a","b"],"allowed":[["a",["a","b"]],["a",["b","a"]],["b",["b","b"]],["b",["a","a"]]]}"#;
const BRANCHING: &str = "[[1,1,0],[0,0,1],[2,1,0]]";

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_treeshift"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn report(args: &[&str], stdin: &str) -> (i32, Value) {
    let out = run(args, stdin);
    let value = serde_json::from_slice(&out.stdout).unwrap();
    (out.status.code().unwrap(), value)
}

#[test]
fn entropy_of_two_symbol() {
    let (code, r) = report(&["entropy", "--witness", "-"], TWO_SYMBOL);
    assert_eq!(code, 0);
    assert_eq!(r["command"], "entropy");
    let h = r["result"]["entropy"].as_f64().unwrap();
    assert!((h - 2f64.ln()).abs() < 1e-11);
    assert_eq!(r["result"]["agreement"], true);
    assert_eq!(r["result"]["witness_spec"]["allowed"][0], serde_json::json!(["a", ["a", "a"]]));
}

#[test]
fn realize_and_verify_branching_matrix() {
    let (code, r) = report(&["realize", "--verify", "-"], BRANCHING);
    assert_eq!(code, 0);
    let v = &r["result"]["verification"];
    assert_eq!(v["passed"], true);
    assert!((v["entropy"].as_f64().unwrap() - 0.609_377_863_3).abs() < 1e-9);
    assert_eq!(r["result"]["plan"]["extended"], serde_json::json!([[1, 1, 0, 1], [0, 0, 1, 2], [2, 1, 0, 0], [0, 0, 0, 3]]));
    assert_eq!(r["result"]["spec"]["allowed"].as_array().unwrap().len(), 7);
}

#[test]
fn oracle_on_full_shift() {
    let (code, r) = report(&["oracle", "--height", "3", "-"], FULL);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["brute_force"], serde_json::json!(["64", "64"]));
    assert_eq!(r["result"]["recursion"], serde_json::json!(["64", "64"]));
    assert_eq!(r["result"]["match"], true);
}

#[test]
fn perron_on_branching_matrix() {
    let (code, r) = report(&["perron", "-"], BRANCHING);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["char_poly_text"], "x^3 - x^2 - x - 1");
    assert_eq!(r["result"]["verdict"], "perron");
}

#[test]
fn minimality_pattern_and_scan() {
    let (code, r) = report(&["minimality", "--pattern", r#"["b",["a","a"]]"#, "-"], SAVING);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["verdict"], "consistent");
    assert_eq!(r["result"]["h_y"], 0.0);
    let (_, scan) = report(&["minimality", "--scan", "-"], SAVING);
    assert_eq!(scan["result"]["reports"].as_array().unwrap().len(), 4);
}

#[test]
fn snre_and_reduce() {
    let (_, s) = report(&["snre", "--levels", "3", "-"], TWO_SYMBOL);
    assert_eq!(s["result"]["counts"], serde_json::json!([["2", "2"], ["8", "8"], ["128", "128"]]));
    let (_, r) = report(&["reduce", "--offset", "1", "--limit", "2", "-"], TWO_SYMBOL);
    assert_eq!(r["result"]["total"], "4");
    assert_eq!(r["result"]["reductions"].as_array().unwrap().len(), 2);
    assert_eq!(r["result"]["reductions"][0]["index"], "1");
}

#[test]
fn output_is_deterministic() {
    let a = run(&["entropy", "-"], TWO_SYMBOL).stdout;
    let b = run(&["entropy", "-"], TWO_SYMBOL).stdout;
    assert_eq!(a, b);
    let pretty = run(&["--format", "pretty", "entropy", "-"], TWO_SYMBOL).stdout;
    let compact: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(serde_json::from_slice::<Value>(&pretty).unwrap(), compact);
}

#[test]
fn thread_count_does_not_change_results() {
    let spec = r#"{"d":2,"alphabet":["a","b","c"],"forbidden":[["a",["a","a"]],["b",["c","c"]]]}"#;
    let one = Command::new(env!("CARGO_BIN_EXE_treeshift"))
        .env("TREESHIFT_THREADS", "1")
        .args(["entropy", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .and_then(|mut c| {
            c.stdin.take().unwrap().write_all(spec.as_bytes())?;
            c.wait_with_output()
        })
        .unwrap();
    assert_eq!(one.stdout, run(&["entropy", "-"], spec).stdout);
}

#[test]
fn exit_codes() {
    let (code, r) = report(&["entropy", "-"], r#"{"d":2}"#);
    assert_eq!(code, 2);
    assert!(r["diagnostics"][0].as_str().unwrap().starts_with("error:"));
    let empty = r#"{"d":2,"alphabet":["a","b"],"allowed":[["a",["a","b"]]]}"#;
    assert_eq!(report(&["entropy", "-"], empty).0, 1);
    assert_eq!(report(&["oracle", "--budget", "10", "-"], FULL).0, 3);
    let (code, r) = report(&["entropy", "--cap", "2", "-"], TWO_SYMBOL);
    assert_eq!(code, 3);
    assert_eq!(r["result"]["exhaustive"], false);
    assert_eq!(report(&["entropy", "--cap", "2", "--no-sample", "-"], TWO_SYMBOL).0, 3);
    assert_eq!(report(&["realize", "-"], "[[0]]").0, 1);
    assert_eq!(report(&["realize", "-"], "[[1,-1],[0,1]]").0, 2);
}

#[test]
fn pruning_is_reported() {
    let spec = r#"{"d":2,"alphabet":["a","b","c"],"allowed":[["a",["a","a"]],["a",["b","a"]],["c",["c","c"]],["b",["c","a"]]]}"#;
    let dead = r#"{"d":2,"alphabet":["a","b","z"],"allowed":[["a",["a","a"]],["b",["z","a"]]]}"#;
    let (code, r) = report(&["entropy", "-"], dead);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["alphabet"], serde_json::json!(["a"]));
    assert!(r["diagnostics"][0].as_str().unwrap().contains("b, z"));
    assert!(report(&["entropy", "-"], spec).1["diagnostics"].as_array().unwrap().is_empty());
}
