//! End-to-end tests of the `pbranch` binary: exit codes, output routing and
//! report contents.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pbranch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbranch"))
        .args(args)
        .env_remove("PBRANCH_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_interp_passes() {
    let out = pbranch(&["verify", "--suite", "interp", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    let checks = doc["suites"][0]["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["anchor"] == "Gauss sum norm relation"));
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn verify_iwahori_confirms_singleton() {
    let out = pbranch(&["verify", "--suite", "iwahori", "--n", "2", "--p", "2", "--beta", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    let checks = doc["suites"][0]["checks"].as_array().unwrap();
    let dc = checks.iter().find(|c| c["anchor"] == "double coset singleton").unwrap();
    assert_eq!(dc["detail"]["singleton"], true);
    assert_eq!(dc["detail"]["representatives"], 64);
}

#[test]
fn verify_all_is_byte_identical() {
    let a = pbranch(&["verify", "--suite", "all", "--seed", "7", "--samples", "3"]);
    let b = pbranch(&["verify", "--suite", "all", "--seed", "7", "--samples", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn budget_exhaustion_exits_2_naming_the_check() {
    let out = pbranch(&["verify", "--suite", "iwahori", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let doc = json_of(&out);
    assert_eq!(doc["error"]["kind"], "budget");
    assert!(doc["error"]["message"].as_str().unwrap().contains("index of congruence subgroups"));
}

#[test]
fn branch_reports() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.json", r#"{"n":2,"d":1,"tau0":0,"kappa0":0,"kappa":[[3,2,-2,-3]],"j":[1]}"#);
    let out = pbranch(&["branch", "--weight", &w]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["delta_constant"], "-1");
    assert_eq!(doc["normalisation_value"], "1");
    assert_eq!(doc["branch_vector"]["components"][0]["eigenspace_dim"], 1);

    let trivial = write(dir.path(), "t.json", r#"{"n":2,"d":1,"kappa":[[0,0,0,0]],"j":[0]}"#);
    let doc = json_of(&pbranch(&["branch", "--weight", &trivial]));
    let terms = doc["branch_vector"]["components"][0]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert!(doc["delta_dagger_samples"]["values"].as_array().unwrap().iter().all(|v| v["value_mod"] == 1));
}

#[test]
fn input_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"n\": 2,\n \"d\": }");
    let out = pbranch(&["branch", "--weight", &bad]);
    assert_eq!(out.status.code(), Some(3));
    let doc = json_of(&out);
    assert_eq!(doc["error"]["kind"], "parse");
    assert!(doc["error"]["message"].as_str().unwrap().contains("line 2"));

    let outside = write(dir.path(), "o.json", r#"{"n":2,"d":1,"kappa":[[2,0,-1,-2]],"j":[1]}"#);
    let out = pbranch(&["branch", "--weight", &outside]);
    assert_eq!(out.status.code(), Some(3));
    assert!(json_of(&out)["error"]["message"].as_str().unwrap().contains("outside the cone"));

    assert_eq!(pbranch(&["verify", "--suite", "nope"]).status.code(), Some(3));
    assert_eq!(pbranch(&["interp", "gauss", "--p", "4", "--order", "2"]).status.code(), Some(3));
}

#[test]
fn interp_factor_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"p":5,"n":2,"d":2,"e":[1,1],
            "characters":[{"level":1,"order":4,"k":1},{"level":0,"order":1,"k":0,"at_p":{"order":2,"exponent":1}}]}"#,
    );
    let out = pbranch(&["interp", "factor", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    let unram = write(dir.path(), "u.json", r#"{"p":5,"n":2,"d":1,"e":[1],"characters":[{"level":0,"order":1,"k":0}]}"#);
    assert_eq!(pbranch(&["interp", "factor", "--config", &unram]).status.code(), Some(3));
}

#[test]
fn output_routing_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_pbranch"))
        .args(["interp", "gauss", "--p", "3", "--order", "2"])
        .env("PBRANCH_OUT_DIR", dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let doc: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("interp.json")).unwrap()).unwrap();
    assert_eq!(doc["norm"], "-3");

    let file = dir.path().join("f.csv");
    let out = pbranch(&["iwahori", "factor", "--sigma", "2,1", "--csv", "--out", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = fs::read_to_string(file).unwrap();
    assert!(csv.starts_with("path,value\n"));
    assert!(csv.contains("matches_closed_form,true"));
}

#[test]
fn tate_subcommands() {
    let out = pbranch(&["tate", "closed", "--k", "3", "--a", "2", "--b", "1", "--lambda", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["agrees_with_direct"], true);
    let out = pbranch(&["tate", "bound", "--m", "3"]);
    assert_eq!(json_of(&out)["bound"]["pass"], true);
    let out = pbranch(&["tate", "chain", "--samples", "20"]);
    assert_eq!(json_of(&out)["s"], 2);
    assert_eq!(pbranch(&["tate", "closed", "--k", "2", "--lambda", "x"]).status.code(), Some(3));
}
