mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use zxnf::cli::{parse_diagram, parse_matrix, run};
use zxnf::diagram::{term_to_json, Angle, Fragment, Term};
use zxnf::interp::{interp_exact, Backend};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zxnf-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn call(args: &[&str]) -> (i32, Vec<Value>) {
    let mut out = Vec::new();
    let mut argv = vec!["zxnf"];
    argv.extend(args);
    let code = run(argv, &mut out);
    let lines = String::from_utf8(out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    (code, lines)
}

#[test]
fn parses_documented_examples() {
    let t = parse_diagram(r#"{"Z":{"in":0,"out":0,"phase":"1/1"}}"#).unwrap();
    assert_eq!(t, Term::z(0, 0, Angle::pi()));
    let t = parse_diagram(r#"{"compose":[{"tensor":["H","H"]}, "Cup"]}"#).unwrap();
    assert_eq!((t.inputs(), t.outputs()), (2, 0));
    let err = parse_diagram(r#"{"Z":{"in":1,"out":1,"phase":"2/3""#).unwrap_err();
    assert_eq!(err.code(), 2);
    let err = parse_diagram(r#"{"Q":{"in":1,"out":1,"phase":"2/3"}}"#).unwrap_err();
    assert_eq!(err.code(), 2);
    let err = parse_diagram(r#"{"Z":{"in":1,"out":1,"phase":"2/0"}}"#).unwrap_err();
    assert_eq!(err.code(), 2);
}

#[test]
fn empty_diagram_is_one() {
    let dir = scratch("empty");
    let f = write(&dir, "empty.json", "\"Empty\"");
    let (code, lines) = call(&["interp", &f]);
    assert_eq!(code, 0);
    let m = zxnf::interp::Matrix::from_json(&lines[0]).unwrap();
    assert_eq!((m.rows(), m.cols()), (1, 1));
    assert_eq!(m.get(0, 0).to_complex(), num_complex::Complex64::new(1.0, 0.0));
}

#[test]
fn rewritten_diagrams_are_equal() {
    let dir = scratch("eq");
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..10 {
        let d = common::random_term(&mut rng, 8, 4, 2);
        let (d2, _) = common::random_rewrites(&mut rng, &d, 3, Fragment::RationalPi { n: 1 });
        let a = write(&dir, &format!("a{i}.json"), &term_to_json(&d).to_string());
        let b = write(&dir, &format!("b{i}.json"), &term_to_json(&d2).to_string());
        assert_eq!(call(&["eq", &a, &b]).0, 0);
        assert_eq!(call(&["eq", &b, &a]).0, 0);
        assert_eq!(call(&["eq", &a, &a]).0, 0);
    }
}

#[test]
fn unequal_and_mismatched_diagrams() {
    let dir = scratch("neq");
    let a = write(&dir, "a.json", r#"{"Z":{"in":1,"out":1,"phase":"1/4"}}"#);
    let b = write(&dir, "b.json", r#"{"X":{"in":1,"out":1,"phase":"1/4"}}"#);
    let c = write(&dir, "c.json", r#"{"Z":{"in":1,"out":2,"phase":"0/1"}}"#);
    let (code, lines) = call(&["eq", &a, &b]);
    assert_eq!(code, 1);
    assert_eq!(lines[0]["equal"], false);
    assert_eq!(call(&["eq", &b, &a]).0, 1);
    assert_eq!(call(&["eq", &a, &c]).0, 3);
    assert_eq!(call(&["eq", "--backend", "float", &a, &b]).0, 1);
}

#[test]
fn exit_codes() {
    let dir = scratch("codes");
    let bad = write(&dir, "bad.json", "{\"Z\":");
    assert_eq!(call(&["interp", &bad]).0, 2);
    assert_eq!(call(&["interp", "/nonexistent/zxnf.json"]).0, 2);
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&["check-rules", "--samples", "0"]).0, 2);
    let real = write(&dir, "real.json", r#"{"Z":{"in":1,"out":1,"phase":{"rad":0.5}}}"#);
    assert_eq!(call(&["interp", "--backend", "exact", &real]).0, 3);
    assert_eq!(call(&["interp", &real]).0, 0);
    let wide = write(&dir, "wide.json", r#"{"Z":{"in":0,"out":13,"phase":"0/1"}}"#);
    assert_eq!(call(&["interp", &wide]).0, 4);
    let narrow = write(&dir, "narrow.json", r#"{"Z":{"in":0,"out":3,"phase":"0/1"}}"#);
    assert_eq!(call(&["interp", "--max-qubits", "2", &narrow]).0, 4);
    assert_eq!(call(&["demo-incompleteness", "--p", "9"]).0, 3);
    assert_eq!(call(&["demo-incompleteness", "--p", "1009"]).0, 4);
}

#[test]
fn normalize_and_synth() {
    let dir = scratch("synth");
    let t = r#"{"compose":[{"Z":{"in":1,"out":2,"phase":"1/4"}},{"tensor":["H",{"X":{"in":1,"out":1,"phase":"1/2"}}]}]}"#;
    let f = write(&dir, "t.json", t);
    let (code, lines) = call(&["normalize", &f]);
    assert_eq!(code, 0);
    let nf = zxnf::normalform::NormalForm::from_json(&lines[0]).unwrap();
    let m = interp_exact(&parse_diagram(t).unwrap()).unwrap();
    assert_eq!(nf.matrix(), m);

    let mf = write(&dir, "m.json", &m.to_json().to_string());
    let (code, lines) = call(&["synth", &mf]);
    assert_eq!(code, 0);
    let d = zxnf::diagram::term_from_json(&lines[0]).unwrap();
    assert_eq!(zxnf::interp::interp(&d, Backend::Exact { order: 8 }).unwrap(), m);
    assert_eq!(parse_matrix(&fs::read_to_string(&mf).unwrap()).unwrap(), m);
}

#[test]
fn incompleteness_demo() {
    let (code, lines) = call(&["demo-incompleteness", "--p", "3", "--samples", "10"]);
    assert_eq!(code, 0);
    let r = &lines[0];
    assert_eq!(r["multiplied_value_complex"][0], 3.0);
    assert_eq!(r["original_value_complex"][0], 0.0);
    assert_eq!(r["multiplier"], 9);
    assert_eq!(r["holds"], true);
}

#[test]
fn rule_audit_is_deterministic() {
    let (code, a) = call(&["check-rules", "--samples", "5", "--fragment", "3", "--seed", "4"]);
    assert_eq!(code, 0);
    assert_eq!(a.last().unwrap()["all_sound"], true);
    let (_, b) = call(&["check-rules", "--samples", "5", "--fragment", "3", "--seed", "4"]);
    assert_eq!(a, b);
    assert_eq!(call(&["check-rules", "--samples", "5", "--backend", "float"]).0, 0);
}

#[test]
fn lemma_corpus_round_trip() {
    let dir = scratch("lemmas");
    let d = dir.to_string_lossy().into_owned();
    assert_eq!(call(&["lemma-corpus", "--emit", &d]).0, 0);
    let (code, lines) = call(&["lemma-corpus", &d]);
    assert_eq!(code, 0);
    assert_eq!(lines.last().unwrap()["all_verified"], true);
    write(&dir, "broken.json", r#"{"lhs":"H"}"#);
    assert_eq!(call(&["lemma-corpus", &d]).0, 2);
    let false_eq = r#"{"lhs":{"Z":{"in":1,"out":1,"phase":"0/1"}},"rhs":{"X":{"in":1,"out":1,"phase":"1/1"}},"provenance":"false"}"#;
    let other = scratch("lemmas-false");
    write(&other, "false.json", false_eq);
    assert_eq!(call(&["lemma-corpus", &other.to_string_lossy()]).0, 1);
}

#[test]
fn binary_runs() {
    let dir = scratch("bin");
    let f = write(&dir, "e.json", "\"Empty\"");
    let out = Command::new(env!("CARGO_BIN_EXE_zxnf")).args(["interp", &f]).output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"], 1);
    let out = Command::new(env!("CARGO_BIN_EXE_zxnf")).args(["interp", "/nonexistent"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}
