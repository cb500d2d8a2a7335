use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nnpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nnpoly"))
        .args(args)
        .env("NNPOLY_THREADS", "2")
        .output()
        .expect("spawn nnpoly")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn bound_table_for_three() {
    let out = nnpoly(&["bound", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["config"]["command"], "bound");
    assert_eq!(v["report"]["safe_a_sq"], "1");
    assert_eq!(v["report"]["rows"][0]["cap_sq"], "4/3");
}

#[test]
fn bound_with_nu_sharpens_cap() {
    let v = json(&nnpoly(&["bound", "--n", "3", "--with-nu"]));
    assert_eq!(v["report"]["nu_safe_a_sq"], "4/3");
}

#[test]
fn cycle_witness_exits_falsified() {
    let out = nnpoly(&["witness-cycle", "--n", "2", "--a", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["report"]["value"], "-1");
    assert_eq!(v["report"]["entry"], serde_json::json!([1, 3]));
    assert_eq!(v["report"]["method"], "structured-cycle");
}

#[test]
fn certify_verified_and_refused() {
    let ok = nnpoly(&["certify", "--n", "2", "--a-sq", "2"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["report"]["verdict"], true);

    let over = nnpoly(&["certify", "--n", "3", "--a-sq", "2"]);
    assert_ne!(over.status.code(), Some(0));
}

#[test]
fn malformed_input_is_an_error() {
    let out = nnpoly(&["certify", "--n", "2", "--a-sq", "1/0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let out = nnpoly(&["falsify", "--coeffs", "1,x", "--m", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runs_are_byte_identical() {
    let args = ["falsify", "--coeffs", "1,1,-3,1,1", "--m", "2", "--seed", "7", "--starts", "16"];
    let first = nnpoly(&args);
    let again = Command::new(env!("CARGO_BIN_EXE_nnpoly"))
        .args(args)
        .env("NNPOLY_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(first.status.code(), Some(2));
    assert_eq!(first.stdout, again.stdout);
}

#[test]
fn falsify_supplied_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "c.csv", "0,1\n1,0\n");
    let out = nnpoly(&["falsify", "--coeffs", "1,1,-3,1,1", "--m", "2", "--matrix", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["report"]["witness"]["value"], "-1");

    let fine = write(dir.path(), "i.csv", "1,0\n0,1\n");
    let out = nnpoly(&["falsify", "--coeffs", "1,1,-3,1,1", "--m", "2", "--matrix", &fine]);
    assert_eq!(out.status.code(), Some(0));

    let negative = write(dir.path(), "n.csv", "1,-1\n0,1\n");
    let out = nnpoly(&["falsify", "--coeffs", "1,1", "--m", "2", "--matrix", &negative]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn recheck_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("w.json");
    let report = report.to_str().unwrap();
    let out = nnpoly(&["-o", report, "witness-cycle", "--n", "3", "--a", "1/2", "--t", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = nnpoly(&["recheck", "--input", report]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let certified = dir.path().join("c.json");
    let certified = certified.to_str().unwrap();
    nnpoly(&["-o", certified, "certify", "--n", "3", "--a-sq", "1"]);
    assert_eq!(nnpoly(&["recheck", "--input", certified]).status.code(), Some(0));

    // A tampered value no longer matches the re-run.
    let text = std::fs::read_to_string(report).unwrap().replace("\"value\": \"-4\"", "\"value\": \"-5\"");
    let tampered = write(dir.path(), "t.json", &text);
    assert_ne!(nnpoly(&["recheck", "--input", &tampered]).status.code(), Some(0));
}

#[test]
fn jll_flags_negative_power_sum() {
    let out = nnpoly(&["jll", "--spectrum", "1,i,-i", "--k-max", "4", "--m-max", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["report"]["jll"]["conjugation_closed"], true);
    assert_eq!(v["report"]["jll"]["all_hold"], false);

    let out = nnpoly(&["jll", "--spectrum", "3,1,1", "--k-max", "4", "--m-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn csv_and_human_formats() {
    let out = nnpoly(&["--format", "csv", "jll", "--spectrum", "2,1", "--k-max", "2", "--m-max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 2);
    assert!(text.lines().next().unwrap().contains(','));

    let out = nnpoly(&["--format", "human", "bound", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty());
}
