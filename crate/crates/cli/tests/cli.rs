use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn corpus(name: &str) -> PathBuf {
    fixtures().join("corpus").join(name)
}

fn impcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_impcat")).args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn valid_triple_exits_zero() {
    let o = impcat(&["check", s(&corpus("fig_prop1.triple.json")), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!(v.to_string().contains("\"valid\""), "{v}");
}

#[test]
fn invalid_triple_exits_one() {
    let o = impcat(&["check", s(&corpus("hoare_inc_fails.triple.json"))]);
    assert_eq!(o.status.code(), Some(1));
    let o = impcat(&["check", s(&corpus("rel_order.triple.json")), "--backend", "par"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_inputs_exit_two_with_a_located_message() {
    let bad = fixtures().join("bad");
    let model = corpus("nat3.model.json");
    for name in ["missing_else.gcl", "wrong_label.icl", "row_mass.model.json"] {
        let o = impcat(&["typecheck", s(&bad.join(name)), "--model", s(&model)]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(name) && err.contains("error["), "{err}");
    }
    let o = impcat(&["check", s(&bad.join("clash.triple.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn typecheck_accepts_the_corpus() {
    let dir = fixtures().join("corpus");
    let mut paths: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path().display().to_string())
        .collect();
    paths.sort();
    let mut args = vec!["typecheck", "--model"];
    let model = corpus("nat3.model.json");
    args.push(s(&model));
    args.extend(paths.iter().map(String::as_str));
    let o = impcat(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn fmt_is_idempotent() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["layout.icl", "nested_loops.gcl", "rel_inc.triple.json", "nat3.model.json"] {
        let p = tmp.path().join(name);
        std::fs::copy(corpus(name), &p).unwrap();
        assert_eq!(impcat(&["fmt", "--write", s(&p)]).status.code(), Some(0), "{name}");
        let once = std::fs::read_to_string(&p).unwrap();
        let o = impcat(&["fmt", "--check", s(&p)]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(impcat(&["fmt", "--write", s(&p)]).status.code(), Some(0));
        assert_eq!(std::fs::read_to_string(&p).unwrap(), once, "{name}");
    }
}

#[test]
fn eval_prints_a_kernel() {
    let o = impcat(&["eval", s(&corpus("countdown.gcl")), "--model", s(&corpus("nat3.model.json")), "--backend", "stoch"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!o.stdout.is_empty());
}

#[test]
fn rule_runs_are_deterministic() {
    let run = || {
        let o = impcat(&[
            "rules", "--rule", "hoare.", "--instances", "5", "--seed", "7", "--backend", "par", "--json",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let mut v = json(&o);
        v.as_object_mut().unwrap().remove("millis");
        for row in v["rows"].as_array_mut().unwrap() {
            row.as_object_mut().unwrap().remove("millis");
        }
        v
    };
    let a = run();
    assert!(!a["rows"].as_array().unwrap().is_empty());
    assert_eq!(a, run());
}

#[test]
fn unknown_rule_is_an_error() {
    let o = impcat(&["rules", "--rule", "no.such.rule", "--instances", "1"]);
    assert_eq!(o.status.code(), Some(2));
}
