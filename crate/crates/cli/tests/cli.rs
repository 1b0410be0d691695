use std::process::{Command, Output};

use serde_json::Value;

fn ltlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltlab")).args(args).output().expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("one JSON document per line")).collect()
}

#[test]
fn shifts_fixture() {
    let out = ltlab(&["shifts", "--p", "3", "--n", "2", "--k", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let docs = json_lines(&out);
    assert_eq!(docs.len(), 1);
    assert_eq!(docs[0]["schema"], "ltlab/1");
    assert_eq!(docs[0]["bc_shift"], 650);
    assert_eq!(docs[0]["alg_shift"], 644);
}

#[test]
fn hyp_is_false_at_three_two() {
    let out = ltlab(&["anss", "hyp", "--p", "3", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("hyp-check(n=2, p=3): false"));
    let docs = json_lines(&ltlab(&["anss", "hyp", "--p", "5", "--n", "2", "--json"]));
    assert_eq!(docs[0]["outcome"]["kind"], "pass");
}

#[test]
fn moore_fixture_and_warning() {
    let docs = json_lines(&ltlab(&["moore", "--p", "3", "--k", "2", "--s", "1", "--json"]));
    let f = &docs[0]["fixture"];
    assert_eq!((f["net_mod_period"].as_i64(), f["known"].as_i64(), f["discrepancy"].as_i64()), (Some(68), Some(116), Some(48)));
    let docs = json_lines(&ltlab(&["moore", "--p", "3", "--k", "2", "--s", "10", "--json"]));
    assert_eq!(docs[0]["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_passes_at_five_two() {
    let out = ltlab(&["verify", "--p", "5", "--n", "2", "--trials", "100", "--seed", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let docs = json_lines(&out);
    assert_eq!(docs.len(), 101);
    for (i, d) in docs[..100].iter().enumerate() {
        assert_eq!(d["trial"], i);
        assert_eq!(d["passed"], true);
    }
    let summary = &docs[100];
    assert_eq!(summary["all_passed"], true);
    assert_eq!(summary["rules"]["detred"]["passed"], 100);
}

#[test]
fn json_output_is_reproducible() {
    let args = ["verify", "--p", "3", "--n", "2", "--trials", "12", "--seed", "7", "--json"];
    let (a, b) = (ltlab(&args), ltlab(&args));
    assert_eq!(a.stdout, b.stdout);
    let args = ["t0", "1+t; 2", "--p", "3", "--n", "2", "--json"];
    assert_eq!(ltlab(&args).stdout, ltlab(&args).stdout);
}

#[test]
fn parse_errors_are_usage_errors() {
    let out = ltlab(&["det", "1;; 1", "--json"]);
    assert_eq!(out.status.code(), Some(2));
    let docs = json_lines(&out);
    assert_eq!(docs.len(), 1);
    assert_eq!(docs[0]["error"]["code"], 2);
    assert!(docs[0]["error"]["message"].as_str().unwrap().contains("position 2"));
}

#[test]
fn ranges_are_enforced() {
    for args in [
        &["t0", "1", "--n", "3"][..],
        &["det", "1", "--n", "4"],
        &["det", "1", "--p", "17", "--n", "1"],
        &["det", "1", "--p", "9", "--n", "1"],
        &["t0", "1", "--j", "5"],
        &["t0", "1", "--N", "201"],
        &["verify", "--trials", "0"],
        &["shifts", "--emit-fixture", "/tmp/x.json"],
    ] {
        let out = ltlab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
    assert_eq!(ltlab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn non_units_are_rejected() {
    assert_eq!(ltlab(&["t0", "3; 1"]).status.code(), Some(2));
    assert_eq!(ltlab(&["zeta", "0; 1"]).status.code(), Some(2));
}

#[test]
fn det_congruence() {
    let docs = json_lines(&ltlab(&["det", "2+t; 1; t", "--p", "5", "--n", "3", "--json"]));
    assert_eq!(docs[0]["congruent"], true);
    assert_eq!(docs[0]["frobenius_fixed"], true);
    let docs = json_lines(&ltlab(&["det", "1; 1", "--p", "3", "--n", "2", "--k", "4", "--json"]));
    assert_eq!(docs[0]["det_int"], 79);
}

#[test]
fn central_elements_act_trivially() {
    let docs = json_lines(&ltlab(&["act", "4", "--x", "1 + u1", "--p", "3", "--n", "2", "--json"]));
    assert_eq!(docs[0]["image"], "1 + u1");
    let docs = json_lines(&ltlab(&["t0", "4", "--p", "3", "--n", "2", "--json"]));
    assert_eq!(docs[0]["t0"], "4");
}

#[test]
fn emit_fixture_writes_both_documents() {
    let path = std::env::temp_dir().join(format!("ltlab-fixture-{}.json", std::process::id()));
    let out = ltlab(&["t0", "1+t; 1", "--p", "3", "--n", "2", "--emit-fixture", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v["schema"], "ltlab/1");
    assert_eq!(v["fgl"]["p"], 3);
    assert_eq!(v["action"]["g"], "1+t; 1");
    assert!(v["fgl"]["coeffs"].as_array().unwrap().len() > 1);
}

#[test]
fn zn_reductions() {
    let docs = json_lines(&ltlab(&["zn", "--p", "3", "--n", "2", "--k", "3", "--json"]));
    assert_eq!(docs[0]["alpha"]["additive_order"], 8);
    assert_eq!(docs[0]["lambda"]["additive_order"], 2);
    assert_eq!(docs[0]["alpha"]["reductions"], serde_json::json!([9, 9, 81]));
}
