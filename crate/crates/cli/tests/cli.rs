use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tspef::consys::ConstraintSystem;

fn tspef(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tspef")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const ASYM5: &str = r#"{
  "n": 5,
  "d": [[0,3,9,4,7],[2,0,6,1,8],[5,4,0,7,2],[9,3,8,0,6],[1,7,3,5,0]],
  "c": [[8,3,7,6],[2,9,5,7],[6,4,9,4],[5,8,1,3]]
}"#;

#[test]
fn build_a_n_counts() {
    let out = tspef(&["build", "a_n", "--m", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["vars"].as_array().unwrap().len(), 9);
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
    assert_eq!(v["nonneg"].as_array().unwrap().len(), 9);
}

#[test]
fn build_output_round_trips_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (poly, size) in [("a_n", "4"), ("q1bar", "5"), ("q2bar", "5")] {
        let path = dir.path().join(format!("{poly}.json"));
        let out = tspef(&["build", poly, "--n", size, "--json", "--output", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let text = fs::read_to_string(&path).unwrap();
        let sys = ConstraintSystem::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        let again = serde_json::to_string_pretty(&sys.to_json()).unwrap() + "\n";
        assert_eq!(text, again, "{poly}");
    }
}

#[test]
fn solve_lap_and_lp1_match_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "four.json", ASYM5);
    for problem in ["lap", "lp1"] {
        let out = tspef(&["solve", problem, "--instance", &f, "--json"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let v = json_of(&out);
        assert_eq!(v["status"], "optimal");
        assert_eq!(v["objective"], "10");
    }
}

#[test]
fn solve_lp0_with_tableau() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "i.json", ASYM5);
    let v = json_of(&tspef(&["solve", "lp0", "--instance", &f, "--json", "--dump-tableau"]));
    assert_eq!(v["status"], "optimal");
    assert!(v["tableau"]["columns"].as_array().unwrap().len() > 100);
    let v = json_of(&tspef(&["solve", "lp0", "--instance", &f, "--json"]));
    assert!(v.get("tableau").is_none());
}

#[test]
fn assignment_costs_are_required_for_lap() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "i.json", r#"{"n":3,"d":[[0,1,2],[1,0,1],[2,1,0]]}"#);
    let out = tspef(&["solve", "lap", "--instance", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`c`"));
}

#[test]
fn floats_and_malformed_json_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "float.json", r#"{"n":2,"d":[[0,3],[4,0.5]]}"#);
    let out = tspef(&["solve", "lp1", "--instance", &f]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("row 1, column 1") && err.contains("exact"), "{err}");

    let f = write(dir.path(), "broken.json", "{\"n\": 2,\n \"d\": [[0, 1], [1 0]]}");
    let out = tspef(&["build", "q1bar", "--instance", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2, column"), "{}", stderr(&out));

    let out = tspef(&["build", "a_n", "--instance", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rational_entries_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "q.json", r#"{"n":2,"d":[[0,"1/3"],[4,0]],"c":[["1/3"]]}"#);
    let v = json_of(&tspef(&["solve", "lap", "--instance", &f, "--json"]));
    assert_eq!(v["objective"], "1/3");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(tspef(&["build", "p_n", "--n", "4"]).status.code(), Some(2));
    assert_eq!(tspef(&["build", "a_n"]).status.code(), Some(2));
    assert_eq!(tspef(&["build", "a_n", "--n", "4", "--m", "4"]).status.code(), Some(2));
    assert_eq!(tspef(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_counterexample_echoes_point() {
    let out = tspef(&["verify", "lemma2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["theorem"], "lemma2");
    assert!(v["counterexample"].is_null());
    assert_eq!(v["trials"], v["passed"]);
    assert_eq!(v["details"]["point"]["y[4,3]"], "2");
    assert_eq!(v["details"]["point"]["w[4,1]"], "3/4");
    assert_eq!(v["details"]["tours"][1], "0->4->3->1->2->0");
}

#[test]
fn verify_small_suites_pass() {
    for args in [
        vec!["verify", "lemma1", "--m", "3"],
        vec!["verify", "equiv-lap-lp1", "--m", "3", "--trials", "4"],
        vec!["verify", "equiv-lp0-lp2", "--n", "5", "--trials", "2"],
        vec!["verify", "applied-costs", "--n", "5", "--trials", "1"],
        vec!["verify", "bound-study", "--n", "5", "--trials", "2"],
        vec!["verify", "nonintegrality"],
        vec!["verify", "birkhoff", "--m", "3"],
    ] {
        let out = tspef(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
        assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    }
}

#[test]
fn bound_study_refuses_negative_costs() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "neg.json",
        r#"{"n":5,"d":[[0,-1,1,1,1],[1,0,1,1,1],[1,1,0,1,1],[1,1,1,0,1],[1,1,1,1,0]]}"#,
    );
    let out = tspef(&["verify", "bound-study", "--instance", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("nonnegative"));
}

#[test]
fn vertices_of_small_polytopes() {
    let v = json_of(&tspef(&["vertices", "a_n", "--m", "3", "--json"]));
    assert_eq!(v["vertices"], 6);
    assert_eq!(v["integral"], 6);
    // with t = w[1,1]: max(0, 2t-1) <= y[1,2] <= min(1, 2t), a quadrilateral
    // with corners (0,0), (1,1), (1/2,0), (1/2,1)
    let v = json_of(&tspef(&["vertices", "q1bar", "--n", "3", "--method", "pivot", "--json"]));
    assert_eq!(v["vertices"], 4);
    assert_eq!(v["integral"], 2);
    let out = tspef(&["vertices", "a_n", "--m", "4", "--max-bases", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("refused"));
}

#[test]
fn project_onto_w() {
    let out = tspef(&["project", "q1bar", "--n", "3", "--onto", "w", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    assert!(v["vars"].as_array().unwrap().iter().all(|x| x.as_str().unwrap().starts_with("w[")));
    let full = v["rows"].as_array().unwrap().len();
    let lean = json_of(&tspef(&["project", "q1bar", "--n", "3", "--onto", "w", "--lp-redundancy", "--json"]));
    assert!(lean["rows"].as_array().unwrap().len() < full);
    let out = tspef(&["project", "q1bar", "--n", "3", "--onto", "w", "--max-fm-rows", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn log_level_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_tspef"))
        .args(["verify", "nonintegrality"])
        .env("RUST_LOG", "debug")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("solve:"));
}
