mod common;

use std::process::{Command, Output};

use common::*;
use serde_json::Value;

fn bcsi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcsi")).args(args).env("BCSI_THREADS", "2").output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn noiseless_region_has_unit_faces() {
    let d = scratch_dir();
    let ch = write(d.path(), "ch.json", NOISELESS);
    let s = write(d.path(), "aux.json", UNIFORM_X);
    let v =
        json(&bcsi(&["region", "--theorem", "t1", "--channel", ch.to_str().unwrap(), "--scheme", s.to_str().unwrap()]));
    let rhs: Vec<f64> = v["inequalities"].as_array().unwrap().iter().map(|i| i["rhs"].as_f64().unwrap()).collect();
    assert_eq!(rhs, vec![1.0, 1.0, 1.0, 1.0, 2.0]);
    assert_eq!(v["inequalities"][4]["coeffs"]["R1"], "2");
    assert_eq!(v["provenance"], "theorem1");
}

#[test]
fn bad_row_exits_one_with_its_index() {
    let d = scratch_dir();
    let ch = write(d.path(), "ch.json", r#"{"x_size":2,"y1_size":2,"y2_size":1,"kernel":[["1","0"],["0.6","0.6"]]}"#);
    let out = bcsi(&["validate", "--channel", ch.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kernel row 1"));
    let missing = bcsi(&["validate", "--channel", "/nonexistent/ch.json"]);
    assert_eq!(missing.status.code(), Some(1));
    let unknown = bcsi(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn oversized_simulation_exits_two() {
    let d = scratch_dir();
    let ch = write(d.path(), "ch.json", NOISELESS);
    let s = write(d.path(), "aux.json", UNIFORM_X);
    let out = bcsi(&[
        "simulate",
        "--channel",
        ch.to_str().unwrap(),
        "--scheme",
        s.to_str().unwrap(),
        "--rates",
        "1,0,0,0,0",
        "--n",
        "40",
        "--trials",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn raw_projection_agrees_and_compare_is_reflexive() {
    let d = scratch_dir();
    let ch = write(d.path(), "ch.json", NOISELESS);
    let s = write(d.path(), "aux.json", UNIFORM_X);
    let v = json(&bcsi(&["raw-project", "--channel", ch.to_str().unwrap(), "--scheme", s.to_str().unwrap()]));
    assert_eq!(v["equal"], true);
    assert_eq!(v["raw"]["variables"].as_array().unwrap().len(), 9);
    let region = d.path().join("r.json");
    let out = bcsi(&[
        "region",
        "--theorem",
        "t1",
        "--channel",
        ch.to_str().unwrap(),
        "--scheme",
        s.to_str().unwrap(),
        "--out",
        region.to_str().unwrap(),
    ]);
    assert!(out.status.success() && out.stdout.is_empty());
    let r = region.to_str().unwrap();
    let v = json(&bcsi(&["compare", r, r]));
    assert_eq!(v["equal"], true);
}

#[test]
fn classify_reports_four_verdicts() {
    let d = scratch_dir();
    let ch = write(d.path(), "bw.json", BLACKWELL);
    let v = json(&bcsi(&["classify", "--channel", ch.to_str().unwrap(), "--resolution", "8"]));
    let props: Vec<&str> = v.as_array().unwrap().iter().map(|x| x["property"].as_str().unwrap()).collect();
    assert_eq!(props, ["deterministic", "degraded", "more_capable", "less_noisy"]);
    assert_eq!(v[0]["holds"], "true");
    assert_eq!(v[1]["holds"], "false");
}

#[test]
fn slice_is_csv_sorted_by_angle() {
    let d = scratch_dir();
    let ch = write(d.path(), "bw.json", BLACKWELL);
    let schemes = d.path().join("schemes.json");
    let out = bcsi(&[
        "slice",
        "--channel",
        ch.to_str().unwrap(),
        "--theorem",
        "t2",
        "--free",
        "R2,R3",
        "--directions",
        "5",
        "--resolution",
        "3",
        "--u-sizes",
        "2",
        "--schemes",
        schemes.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("angle,R2,R3,scheme_id"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    let ids: Value = serde_json::from_str(&std::fs::read_to_string(schemes).unwrap()).unwrap();
    for row in &rows {
        assert!(ids.get(row[3]).is_some());
    }
}

#[test]
fn help_explains_side_information() {
    let out = bcsi(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("already known at receiver 2"));
    assert!(text.contains("BCSI_THREADS"));
}
