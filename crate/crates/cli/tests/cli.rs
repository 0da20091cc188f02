//! End-to-end runs of the compiled binary: exit codes, both output
//! formats, stdin handling, and scan determinism.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use keller_core::endo::{compose, parse_map_str, PolyMap};
use keller_core::scan::{determinism_hash, read_report};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_keller"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write_file(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path.display().to_string()
}

const TRIANGULAR_3D: &str = "nvars: 3\nx1 -> x1\nx2 -> x2 + x1^2\nx3 -> x3 + x2^2\n";
const NON_KELLER_2D: &str = "nvars: 2\nx1 -> x1^2\nx2 -> x2\n";
const SHEAR_2D: &str = "nvars: 2\nx1 -> x1\nx2 -> x2 + x1^2\n";

#[test]
fn parse_reprints_canonically_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "m.map", "nvars: 2\nx2 -> x2+x1^2\nx1 -> x1\n");

    let out = run(&["parse", &file]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "nvars: 2\nx1 -> x1\nx2 -> x1^2 + x2\n");

    let out = run(&["parse", &file, "--format", "records"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["nvars"], 2);
    assert_eq!(v["coordinates"][1], "x1^2 + x2");
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["parse", &dir.path().join("absent.map").display().to_string()]);
    assert_eq!(code(&out), 2);

    let file = write_file(dir.path(), "bad.map", "nvars: 2\nx1 -> @@\nx2 -> x2\n");
    let out = run(&["parse", &file]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = run(&["frobnicate"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn keller_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let keller = write_file(dir.path(), "k.map", SHEAR_2D);
    let non = write_file(dir.path(), "n.map", NON_KELLER_2D);

    let out = run(&["keller", &keller]);
    assert_eq!((code(&out), stdout(&out).trim().to_string()), (0, "true".to_string()));

    let out = run(&["keller", &non]);
    assert_eq!((code(&out), stdout(&out).trim().to_string()), (1, "false".to_string()));

    let out = run(&["jacobian", &non]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "2*x1");
}

#[test]
fn invert_triangular_example() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "t.map", TRIANGULAR_3D);
    let out = run(&["invert", &file]);
    assert_eq!(code(&out), 0);

    let f = parse_map_str(TRIANGULAR_3D).unwrap();
    let g = parse_map_str(&stdout(&out)).unwrap();
    assert_eq!(compose(&f, &g).unwrap(), PolyMap::identity(3));
    assert_eq!(compose(&g, &f).unwrap(), PolyMap::identity(3));
}

#[test]
fn invert_negative_is_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "n.map", "nvars: 2\nx1 -> x1^3\nx2 -> x2\n");
    let out = run(&["invert", &file]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("not an automorphism"));

    let out = run(&["invert", &file, "--format", "records"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["inverted"], false);
    assert_eq!(v["inverse"], serde_json::Value::Null);
}

#[test]
fn degree_and_minpoly_report_measurements() {
    let dir = tempfile::tempdir().unwrap();
    let control = write_file(dir.path(), "c.map", "nvars: 2\nx1 -> x1^2\nx2 -> x2^2\n");
    let out = run(&["degree", &control, "--seed", "4", "--format", "records"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["extension_degree"], 4);

    let shear = write_file(dir.path(), "s.map", SHEAR_2D);
    let out = run(&["minpoly", &shear, "--seed", "4", "--format", "records"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["degrees"], serde_json::json!([1, 1]));
}

#[test]
fn formanek_and_classify_on_the_triangular_example() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "t.map", TRIANGULAR_3D);

    let out = run(&["formanek", &file]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("true"));

    let out = run(&["classify", &file, "--format", "records"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rule"], "WANG_QUADRATIC_DEGREE");
    assert_eq!(v["verified_by_inversion"], true);

    let non = write_file(dir.path(), "n.map", NON_KELLER_2D);
    let out = run(&["classify", &non]);
    assert_eq!(code(&out), 1);
}

#[test]
fn cmw_prints_the_affine_part_and_tail() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "s.map", SHEAR_2D);
    let out = run(&["cmw", &file, "--format", "records"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["coefficients"], serde_json::json!(["0", "0", "1"]));

    let swapped = write_file(dir.path(), "b.map", "nvars: 2\nx1 -> x1 + x2^2\nx2 -> x2\n");
    let out = run(&["cmw", &swapped]);
    assert_eq!(code(&out), 1);
}

#[test]
fn stdin_works_for_map_input() {
    let mut child = bin()
        .args(["keller", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.as_mut().unwrap().write_all(SHEAR_2D.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn generate_is_deterministic_and_keller() {
    let args = ["generate", "--family", "triangular", "--n", "3", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));

    let map = parse_map_str(&stdout(&a)).unwrap();
    assert!(map.is_keller());
    assert_eq!(map.metadata().get("family").map(String::as_str), Some("triangular"));
    assert_eq!(map.metadata().get("seed").map(String::as_str), Some("7"));

    let out = run(&["generate", "--family", "parabolic"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn scan_reports_are_determinism_hash_equal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_file(
        dir.path(),
        "scan.cfg",
        "seed = 11\nn = 2..3\nfamily = triangular 3\nchecks = degree_conjecture, classify, invert\n",
    );
    let rep1 = dir.path().join("rep1.ldjson");
    let rep2 = dir.path().join("rep2.ldjson");

    let out = run(&["scan", &cfg, "--out", &rep1.display().to_string()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("maps: 3"));
    let out = run(&["scan", &cfg, "--out", &rep2.display().to_string()]);
    assert_eq!(code(&out), 0);

    let a = read_report(&rep1).unwrap();
    let b = read_report(&rep2).unwrap();
    assert_eq!(a.len(), 3);
    assert_eq!(determinism_hash(&a), determinism_hash(&b));
    for r in &a {
        assert!(r.keller);
        assert_eq!(r.degree_conjecture.map(|v| v.to_string()).as_deref(), Some("HOLDS"));
    }

    let bad = write_file(dir.path(), "bad.cfg", "wat = 1\n");
    let out = run(&["scan", &bad]);
    assert_eq!(code(&out), 2);
}

#[test]
fn scan_seed_override_changes_the_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_file(
        dir.path(),
        "scan.cfg",
        "seed = 1\nn = 2\nfamily = triangular 2\nchecks = invert\n",
    );
    let rep1 = dir.path().join("r1.ldjson");
    let rep2 = dir.path().join("r2.ldjson");
    assert_eq!(code(&run(&["scan", &cfg, "--out", &rep1.display().to_string()])), 0);
    assert_eq!(
        code(&run(&["scan", &cfg, "--seed", "2", "--out", &rep2.display().to_string()])),
        0
    );
    let a = read_report(&rep1).unwrap();
    let b = read_report(&rep2).unwrap();
    assert_ne!(determinism_hash(&a), determinism_hash(&b));
}
