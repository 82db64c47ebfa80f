use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

use tracecoord::classify::{random_reducible_pair, ReducedCase};
use tracecoord::matrix::{
    diag, random_loxodromic, random_sl4, random_su31, real_diag, GroupElement, GroupElementJson, C64,
};

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tracecoord")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let (code, stdout, stderr) = run(args);
    let value = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stdout} / {stderr}"));
    (code, value)
}

fn write_pair(dir: &Path, name: &str, a: &GroupElement, b: &GroupElement) -> PathBuf {
    let path = dir.join(name);
    let body = json!({ "a": GroupElementJson::from(a), "b": GroupElementJson::from(b) });
    std::fs::write(&path, body.to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn su31_pair(seed: u64) -> (GroupElement, GroupElement) {
    (random_su31(2 * seed, 0.5), random_su31(2 * seed + 1, 0.5))
}

fn values(v: &Value) -> Vec<(f64, f64)> {
    v["values"].as_array().unwrap().iter().map(|z| (z[0].as_f64().unwrap(), z[1].as_f64().unwrap())).collect()
}

#[test]
fn sample_writes_valid_deterministic_files() {
    let d1 = TempDir::new().unwrap();
    let d2 = TempDir::new().unwrap();
    for d in [&d1, &d2] {
        let (code, _, _) = run(&["sample", "--group", "su31", "--count", "1", "--seed", "0", "--dir", s(d.path())]);
        assert_eq!(code, 0);
    }
    let f1 = std::fs::read(d1.path().join("su31-s0-0000.json")).unwrap();
    let f2 = std::fs::read(d2.path().join("su31-s0-0000.json")).unwrap();
    assert_eq!(f1, f2);
    let g: GroupElementJson = serde_json::from_slice(&f1).unwrap();
    assert!(g.to_element().unwrap().is_su31());

    let d3 = TempDir::new().unwrap();
    let (code, _, _) = run(&["sample", "--group", "loxodromic", "--count", "0", "--seed", "0", "--dir", s(d3.path())]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_dir(d3.path()).unwrap().count(), 0);
}

#[test]
fn sample_requires_seed() {
    let d = TempDir::new().unwrap();
    let (code, _, _) = run(&["sample", "--group", "sl4", "--count", "1", "--dir", s(d.path())]);
    assert_eq!(code, 3);
}

#[test]
fn coords_identity_conjugate_and_errors() {
    let d = TempDir::new().unwrap();
    let id = GroupElement::identity(tracecoord::matrix::Flavor::Su31);
    let p = write_pair(d.path(), "id.json", &id, &id);
    let (code, v) = run_json(&["coords", s(&p)]);
    assert_eq!(code, 0);
    assert!(values(&v["trace_vector"]).iter().all(|&(re, im)| re == 4.0 && im == 0.0));
    assert_eq!(v["real_coordinates"]["values"].as_array().unwrap().len(), 39);

    let (a, b) = su31_pair(1);
    let g = random_su31(99, 0.5);
    let p1 = write_pair(d.path(), "p.json", &a, &b);
    let p2 = write_pair(d.path(), "q.json", &a.conjugate_by(&g), &b.conjugate_by(&g));
    let (_, v1) = run_json(&["coords", s(&p1)]);
    let (_, v2) = run_json(&["coords", s(&p2)]);
    for (x, y) in values(&v1["trace_vector"]).iter().zip(values(&v2["trace_vector"])) {
        assert!((x.0 - y.0).hypot(x.1 - y.1) < 1e-9);
    }

    let (code, csv, _) = run(&["coords", s(&p1), "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(csv.lines().count(), 40);

    let sl = write_pair(d.path(), "sl.json", &random_sl4(0), &random_sl4(1));
    assert_eq!(run(&["coords", s(&sl)]).0, 2);
    assert_eq!(run(&["coords", s(&sl), "--catalog", "SL4_SYMMETRIC_30"]).0, 0);
    assert_eq!(run(&["coords", s(&sl), "--catalog", "SL4_SYMMETRIC_30", "--format", "csv"]).0, 3);

    let bad = d.path().join("bad.json");
    std::fs::write(&bad, "{\"a\": 1}").unwrap();
    assert_eq!(run(&["coords", s(&bad)]).0, 3);
    assert_eq!(run(&["coords", s(&p1), "--catalog", "NOPE"]).0, 3);
}

#[test]
fn verify_suites() {
    let (code, v) = run_json(&["verify", "--suite", "su31-reality", "--random", "1000", "--seed", "4"]);
    assert_eq!(code, 0);
    assert!(v["max_residual"].as_f64().unwrap() < 1e-9);

    let d = TempDir::new().unwrap();
    let id = GroupElement::identity(tracecoord::matrix::Flavor::Sl4);
    let p = write_pair(d.path(), "id.json", &id, &id);
    let (code, v) = run_json(&["verify", s(&p), "--suite", "sublemma"]);
    assert_eq!(code, 0);
    assert_eq!(v["max_residual"].as_f64().unwrap(), 0.0);

    let sl = write_pair(d.path(), "sl.json", &random_sl4(2), &random_sl4(3));
    let (code, v) = run_json(&["verify", s(&sl), "--suite", "eliminated"]);
    assert_eq!(code, 1);
    assert!(v["max_residual"].as_f64().unwrap() > 1e-3);
    assert_eq!(run(&["verify", s(&sl), "--suite", "long-word"]).0, 2);
    assert_eq!(run(&["verify", "--suite", "xy2", "--random", "3"]).0, 3);
    assert_eq!(run(&["verify", s(&sl), "--suite", "nope"]).0, 3);
}

#[test]
fn classify_reports() {
    let d = TempDir::new().unwrap();
    let u = C64::from_polar(1.0, 0.7);
    let a = GroupElement::su31(real_diag([2.0, 1.0, 1.0, 0.5])).unwrap();
    let b = GroupElement::su31(diag([C64::new(3.0, 0.0), u, u.conj(), C64::new(1.0 / 3.0, 0.0)])).unwrap();
    let p = write_pair(d.path(), "block.json", &a, &b);
    let (code, v) = run_json(&["classify", s(&p)]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "ReducibleLine");
    assert_eq!(v["signature"], json!([1, 1]));
    assert!(v["tolerances"]["modulus"].as_f64().is_some());

    let p = write_pair(d.path(), "rand.json", &random_sl4(5), &random_sl4(6));
    let (_, v) = run_json(&["classify", s(&p)]);
    assert_eq!(v["verdict"], "Irreducible");
    assert_eq!(v["span_dimension"], 16);

    let p = write_pair(d.path(), "lox.json", &random_loxodromic(1, 2.0), &random_loxodromic(2, 3.0));
    let (_, v) = run_json(&["classify", s(&p)]);
    assert_eq!(v["isometry"], json!(["Loxodromic", "Loxodromic"]));
}

#[test]
fn conjugacy_commands() {
    let d = TempDir::new().unwrap();
    let (a, b) = su31_pair(7);
    let g = random_su31(70, 0.5);
    let p = write_pair(d.path(), "p.json", &a, &b);
    let q = write_pair(d.path(), "q.json", &a.conjugate_by(&g), &b.conjugate_by(&g));
    let (code, v) = run_json(&["conjugacy", s(&p), s(&q)]);
    assert_eq!(code, 0);
    assert!(v["coordinate_distance"].as_f64().unwrap() < 1e-9);
    let (code, v) = run_json(&["conjugacy", s(&p), s(&q), "--find-conjugator"]);
    assert_eq!(code, 0);
    assert_eq!(v["kernel_dimension"], 1);
    assert!(v["conjugator"]["rows"].is_array());

    let r = write_pair(d.path(), "r.json", &a, &random_su31(71, 0.5));
    assert_eq!(run(&["conjugacy", s(&p), s(&r)]).0, 1);
    assert_eq!(run(&["conjugacy", s(&p), s(&r), "--find-conjugator"]).0, 1);

    let id = GroupElement::identity(tracecoord::matrix::Flavor::Su31);
    let i = write_pair(d.path(), "i.json", &id, &id);
    let (code, v) = run_json(&["conjugacy", s(&i), s(&i)]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "CoordinatesEqualUnverified");
    assert_eq!(run(&["conjugacy", s(&i), s(&i), "--find-conjugator"]).0, 2);

    let (la, lb) = random_reducible_pair(3, ReducedCase::Line);
    let l1 = write_pair(d.path(), "l1.json", &la, &lb);
    let l2 = write_pair(d.path(), "l2.json", &la.conjugate_by(&g), &lb.conjugate_by(&g));
    let (code, v) = run_json(&["conjugacy", s(&l1), s(&l2), "--reduced"]);
    assert_eq!(code, 0);
    assert!(v["conjugation_residual"].as_f64().unwrap() < 1e-7);
    assert_eq!(run(&["conjugacy", s(&p), s(&q), "--reduced"]).0, 2);
}

#[test]
fn fit_from_coords_output() {
    let d = TempDir::new().unwrap();
    let (a, b) = su31_pair(9);
    let p = write_pair(d.path(), "p.json", &a, &b);
    let coords = d.path().join("coords.json");
    assert_eq!(run(&["coords", s(&p), "--out", s(&coords)]).0, 0);
    let (code, v) = run_json(&["fit", s(&coords), "--seed", "1"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["converged"], true);
    assert!(v["residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["config"]["seed"], 1);
    assert_eq!(run(&["fit", s(&coords)]).0, 3);
}

#[test]
fn jacobian_ranks() {
    let d = TempDir::new().unwrap();
    let id = GroupElement::identity(tracecoord::matrix::Flavor::Sl4);
    let p = write_pair(d.path(), "id.json", &id, &id);
    let (code, v) = run_json(&["jacobian", s(&p)]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["rank"], 0);
    let (_, v) = run_json(&["jacobian", "--random", "--seed", "3", "--params-only"]);
    assert_eq!(v["report"]["rank"], 15);
    let (_, v) = run_json(&["jacobian", "--random", "--seed", "3"]);
    assert_eq!(v["report"]["rank"], 15);
    let (_, v) = run_json(&["jacobian", "--random", "--seed", "3", "--catalog", "SU31_22"]);
    assert_eq!(v["report"]["rank"], 15);
    assert_eq!(run(&["jacobian", "--random"]).0, 3);
}

#[test]
fn fuzz_summary() {
    let (code, v) = run_json(&["fuzz", "--trials", "100", "--seed", "5"]);
    assert_eq!(code, 0);
    for suite in v["suites"].as_array().unwrap() {
        assert_eq!(suite["failed"], 0, "{suite}");
        assert_eq!(suite["passed"], 100);
    }
    let (code, v) = run_json(&["fuzz", "--trials", "0", "--seed", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["suites"], json!([]));
    let (code, v) = run_json(&["fuzz", "--trials", "20", "--seed", "5", "--inject-fault"]);
    assert_eq!(code, 1);
    assert_eq!(v["fault_injected"], true);
    assert_eq!(run(&["fuzz", "--trials", "5"]).0, 3);
}

#[test]
fn output_is_deterministic() {
    let (_, a, _) = run(&["fuzz", "--trials", "3", "--seed", "8"]);
    let (_, b, _) = run(&["fuzz", "--trials", "3", "--seed", "8"]);
    assert_eq!(a, b);
}
