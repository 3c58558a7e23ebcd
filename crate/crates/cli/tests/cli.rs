use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_coherent");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("spawn coherent")
}

fn report(args: &[&str], json: &Path) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--json", json.to_str().unwrap()]);
    let out = run(&full);
    let text = fs::read_to_string(json).expect("report written");
    (
        out.status.code().unwrap(),
        serde_json::from_str(&text).unwrap(),
    )
}

fn has_pair(list: &Value, better: &str, worse: &str, strict: bool) -> bool {
    list.as_array()
        .unwrap()
        .iter()
        .any(|p| p["better"] == better && p["worse"] == worse && p["strict"] == strict)
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["check"]).status.code(), Some(1));
    assert_eq!(
        run(&["check", "--gen", "nonsense:3"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["check", "--scenario", "/no/such/file.json"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn contradictory_document_is_a_load_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        r#"{"name":"bad","description":"","commutative":false,
            "elements":[{"id":0,"label":"p"},{"id":1,"label":"q"}],
            "generators":[],"weak":[],"strict":[[0,1],[1,0]]}"#,
    )
    .unwrap();
    let out = run(&["check", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn strong_on_requires_commutativity() {
    let out = run(&["check", "--gen", "koopmans:1", "--strong", "on"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn two_track_predicts_the_diagonal_pair() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let (code, r) = report(&["forced", "--gen", "two-track:5"], &json);
    assert_eq!(code, 0);
    assert!(has_pair(&r["novel"], "(a,0)", "(b,0)", true));
    assert!(!has_pair(&r["closure_forced"], "(a,0)", "(b,0)", true));
    let v = r["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["first"] == "(a,0)" && v["second"] == "(b,0)")
        .unwrap();
    assert_eq!(v["status"], "forced_strict");
    assert_eq!(v["above"], "(a,0)");
}

#[test]
fn koopmans_is_unsat_with_a_pair_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let (code, r) = report(&["extend", "--gen", "koopmans:1"], &json);
    assert_eq!(code, 2);
    let ext = &r["extension"];
    assert_eq!(ext["satisfiable"], false);
    let dead = ext["certificate"]["dead_pairs"].as_array().unwrap();
    assert_eq!(dead.len(), 1);
    let mut pair: Vec<&str> = dead[0]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    pair.sort();
    assert_eq!(pair, ["σx", "σy"]);

    let (code, _) = report(&["forced", "--gen", "koopmans:1"], &json);
    assert_eq!(code, 2);
}

#[test]
fn extend_writes_a_dot_file() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let out = run(&[
        "extend",
        "--gen",
        "two-track:2",
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("->"));
    assert!(text.trim_end().ends_with('}'));
}

#[test]
fn oracle_refuses_large_windows() {
    let out = run(&["oracle", "--gen", "two-track:2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn oracle_agrees_on_small_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    for seed in 0..10u64 {
        let seed = seed.to_string();
        let (code, r) = report(
            &[
                "oracle",
                "--gen",
                "random:5,2,0.3,total,commutative",
                "--seed",
                &seed,
            ],
            &json,
        );
        assert_eq!(code, 0, "{r}");
        assert!(r["oracle"]["mismatches"].as_array().unwrap().is_empty());
    }
    let (code, r) = report(&["forced", "--gen", "two-track:1", "--oracle"], &json);
    assert_eq!(code, 0);
    assert_eq!(r["oracle"]["extensions"], 13);
}

#[test]
fn report_counts_match_lists() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let (_, r) = report(&["forced", "--gen", "dated:2,3"], &json);
    let c = &r["counts"];
    assert_eq!(c["seed"], r["seed_pairs"].as_array().unwrap().len());
    assert_eq!(
        c["closure_forced"],
        r["closure_forced"].as_array().unwrap().len()
    );
    assert_eq!(
        c["exact_forced"],
        r["exact_forced"].as_array().unwrap().len()
    );
    assert_eq!(c["novel"], r["novel"].as_array().unwrap().len());
    assert_eq!(r["window_relative"], true);
}

#[test]
fn dump_round_trips_through_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("s.json");
    let out = run(&[
        "dump",
        "--gen",
        "homothetic:2,2",
        "--json",
        doc.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let again = dir.path().join("t.json");
    let out = run(&[
        "dump",
        "--scenario",
        doc.to_str().unwrap(),
        "--json",
        again.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&doc).unwrap(), fs::read(&again).unwrap());
}
