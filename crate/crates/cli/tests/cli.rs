use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrsnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn file(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const TOY: &str =
    r#"{"h":4,"r":[1,3,2,3],"S":[[1,2,3],[1,2,4],[1,3,4],[2,3,4]],"t":2,"rho":2,"ell":3}"#;

#[test]
fn check_reports_witness_and_exit_code() {
    let dir = TempDir::new().unwrap();
    let bad = file(&dir, "bad.txt", "1\n1\n");
    let o = run(&["check", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violating rows: {1,2}"));

    let empty = file(&dir, "empty.txt", "-\n-\n");
    let o = run(&["check", &empty, "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("condition holds: yes"));
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let broken = file(&dir, "broken.txt", "1 2\nx\n");
    let o = run(&["check", &broken]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(run(&["check"]).status.code(), Some(2));
}

#[test]
fn construct_micro_code_and_round_trip_record() {
    let dir = TempDir::new().unwrap();
    let pat = file(&dir, "p.txt", "2\n1\n");
    let out = dir.path().join("code.json");
    let o = run(&[
        "construct",
        &pat,
        "--n",
        "4",
        "--q",
        "3",
        "--m",
        "2",
        "--ell",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("sum-rank distance 3"));
    let rec: lrsnet::construct::CodeRecord =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let cc = lrsnet::construct::ConstrainedCode::from_record(&rec).unwrap();
    assert_eq!(cc.g.get(0, 1).0, 0);
    assert_eq!(cc.g.get(1, 0).0, 0);

    let csv = dir.path().join("code.csv");
    let o = run(&[
        "construct",
        &pat,
        "--n",
        "4",
        "--parts",
        "2,2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        lrsnet::construct::ConstrainedCode::from_csv(&fs::read_to_string(csv).unwrap()).is_ok()
    );
}

#[test]
fn violating_pattern_needs_subcode_flag() {
    let dir = TempDir::new().unwrap();
    let pat = file(&dir, "v.txt", "1 2\n1 2\n");
    let o = run(&["construct", &pat, "--n", "6", "--ell", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rows {1}"));
    let o = run(&["construct", &pat, "--n", "6", "--ell", "2", "--subcode"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("covering dimension 4"), "{text}");
    assert!(text.contains("sum-rank distance 3"), "{text}");
}

fn design(dir: &TempDir, instance: &str) -> String {
    let inst = file(dir, "inst.json", instance);
    let out = dir.path().join("design.json");
    let o = run(&["design", &inst, "--out", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    out.to_str().unwrap().to_owned()
}

#[test]
fn design_toy_network_and_table() {
    let dir = TempDir::new().unwrap();
    let inst = file(&dir, "toy.json", TOY);
    let o = run(&["design", &inst, "--params-only"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["params"]["n"], 23);
    assert_eq!(v["params"]["d"], 15);
    assert_eq!(v["params"]["k_tilde"], 9);

    let o = run(&["design", &inst, "--table", "4"]);
    let text = stdout(&o);
    for row in ["[15, 9, 7]", "[19, 9, 11]", "[23, 9, 15]", "[27, 9, 19]"] {
        assert!(text.contains(row), "{text}");
    }

    let uncovered = file(
        &dir,
        "bad.json",
        r#"{"h":2,"r":[1,1],"S":[[1]],"t":0,"rho":0,"ell":1}"#,
    );
    assert_eq!(run(&["design", &uncovered]).status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_and_lossless_without_adversary() {
    let dir = TempDir::new().unwrap();
    let d = design(
        &dir,
        r#"{"h":2,"r":[1,1],"S":[[1],[1,2]],"t":0,"rho":0,"ell":2}"#,
    );
    let a = run(&["simulate", &d, "--trials", "40", "--seed", "5"]);
    let b = run(&["simulate", &d, "--trials", "40", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["lossless"]["succeeded"], 40);
    assert_eq!(v["seed"], 5);
}

#[test]
fn simulate_audits_an_adversarial_design() {
    let dir = TempDir::new().unwrap();
    let d = design(
        &dir,
        r#"{"h":2,"r":[1,1],"S":[[1,2]],"t":1,"rho":1,"ell":2}"#,
    );
    let o = run(&["simulate", &d, "--trials", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["audit"]["error_ok"], 30);
    assert_eq!(v["decoding"]["succeeded"], v["decoding"]["trials"]);
}

#[test]
fn tables_lists_both_scenarios() {
    let o = run(&["tables"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("[33, 27, 7]"));
    assert!(text.contains("[8, 7, 8]"));
    assert!(Path::new(env!("CARGO_BIN_EXE_lrsnet")).exists());
}
