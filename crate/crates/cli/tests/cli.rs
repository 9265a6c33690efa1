use std::process::{Command, Output};

use modinv::{Element, FieldConfig, GeneratorTable};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modinv"))
        .args(args)
        .env_remove("MODINV_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Parses `text` over rank `n` at `p`.
fn element(p: u32, n: usize, text: &str) -> Element {
    let table = GeneratorTable::cohomology(FieldConfig::new(p).unwrap(), n).unwrap();
    Element::parse(&table, text).unwrap()
}

fn same(p: u32, n: usize, got: &str, want: &str) {
    assert_eq!(element(p, n, got.trim()), element(p, n, want), "{got:?} vs {want:?}");
}

#[test]
fn compute_examples() {
    let q = stdout(&["compute", "dickson", "--p", "3", "--n", "2", "--s", "1"]);
    same(3, 2, &q, "y1^6 + y1^4*y2^2 + y1^2*y2^4 + y2^6");
    let m = stdout(&["compute", "mui", "--p", "3", "--n", "2", "--S", "1"]);
    same(3, 2, &m, "x1*y2 + 2*x2*y1");
    let l = stdout(&["compute", "bracket", "--p", "3", "--n", "2", "--k", "0", "--e", "0,1"]);
    same(3, 2, &l, "y1*y2^3 + 2*y1^3*y2");
}

#[test]
fn apply_examples() {
    let a = stdout(&["apply", "--op", "P^1", "--input", "mui:2:1", "--p", "3"]);
    same(3, 2, &a, "x1*y2^3 + 2*x2*y1^3");
    let b = stdout(&["apply", "--op", "beta", "--input", "x1*x2"]);
    same(3, 2, &b, "x2*y1 + 2*x1*y2");
    let c = stdout(&["apply", "--op", "St^{(0),()}", "--input", "x1"]);
    assert_eq!(c.trim(), "y1");
}

#[test]
fn apply_both_engines_agree() {
    let out = stdout(&["apply", "--op", "P^1", "--input", "mui:2:0", "--engine", "both"]);
    assert!(out.lines().any(|l| l == "verdict: match"), "{out}");
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "--theorem", "t13", "--p", "3", "--n", "2"]).status.code(), Some(0));
    let all = run(&["verify", "--theorem", "all", "--p", "3", "--n", "2", "--m", "2", "--budget", "30"]);
    assert_eq!(all.status.code(), Some(0));
    let bad = run(&["verify", "--theorem", "t11", "--p", "3", "--n", "2", "--e", "0,0"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("distinct"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["compute", "dickson", "--p", "4", "--n", "2", "--s", "1"]).status.code(), Some(2));
    assert_eq!(run(&["apply", "--op", "Q^1", "--input", "x1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let threads = Command::new(env!("CARGO_BIN_EXE_modinv"))
        .args(["compute", "L", "--n", "2"])
        .env("MODINV_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--theorem", "t11", "--n", "2", "--m", "1", "--output", "records"];
    let first = run(&args);
    let second = Command::new(env!("CARGO_BIN_EXE_modinv"))
        .args(args)
        .env("MODINV_THREADS", "1")
        .output()
        .unwrap();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn records_round_trip() {
    let out = stdout(&["verify", "--theorem", "p45", "--n", "2", "--output", "records"]);
    let mut cases = 0;
    for line in out.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        if v.get("verdict").is_none() {
            continue;
        }
        cases += 1;
        let expected = v["expected"].as_str().unwrap();
        assert_eq!(element(3, 2, expected).render(), expected);
        for e in v["engines"].as_array().unwrap() {
            let value = e["value"].as_str().unwrap();
            assert_eq!(element(3, 2, value).render(), value);
        }
        assert_eq!(v["verdict"], "pass");
    }
    assert!(cases > 0);

    let rec = stdout(&["compute", "mui", "--n", "3", "--S", "0,2", "--output", "records"]);
    let v: Value = serde_json::from_str(rec.trim()).unwrap();
    let text = v["element"].as_str().unwrap();
    let u = element(3, 3, text);
    assert_eq!(u.render(), text);
    assert_eq!(v["degree"].as_u64(), u.degree());
}

#[test]
fn records_have_stable_key_order() {
    let rec = stdout(&["compute", "V", "--n", "2", "--output", "records"]);
    assert!(rec.starts_with("{\"inputs\":{\"kind\":\"V\",\"n\":2,\"p\":3},\"degree\":6,\"element\":"));
}
