use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_choquet-tower");
const SPACE_FILE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/comonotone.json");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn csv_rows(args: &[&str]) -> Vec<Vec<String>> {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn ellsberg_alpha_one_is_flat() {
    let doc = json(&[
        "ellsberg",
        "--variant",
        "X",
        "--big-n",
        "10",
        "--alpha",
        "1",
        "--u1",
        "0.6",
        "--layer",
        "2",
    ]);
    let row = &doc["result"]["rows"][0];
    assert_eq!(
        [&row["f1"], &row["f2"], &row["f3"], &row["f4"]].map(|v| v.as_str().unwrap()),
        ["1/5", "1/5", "2/5", "2/5"]
    );
    assert_eq!(doc["result"]["verdict"], "equalities");

    let rows = csv_rows(&[
        "ellsberg",
        "--variant",
        "X",
        "--big-n",
        "10",
        "--alpha",
        "1",
        "--u1",
        "0.6",
        "--backend",
        "float",
        "--format",
        "csv",
    ]);
    assert_eq!(rows[0][1..5], ["0.2", "0.2", "0.4", "0.4"]);
}

#[test]
fn ellsberg_third_layer() {
    let doc = json(&[
        "ellsberg",
        "--variant",
        "Z",
        "--big-n",
        "1",
        "--alpha",
        "2",
        "--u1",
        "0.6",
        "--layer",
        "3",
    ]);
    assert_eq!(doc["result"]["rows"][0]["f2"], "1/6");
    assert_eq!(doc["result"]["verdict"], "modal-preference");
    assert_eq!(doc["result"]["consistent"], true);
}

#[test]
fn bad_flags_exit_with_usage() {
    assert_eq!(run(&["ellsberg", "--variant", "Q"]).status.code(), Some(1));
    assert_eq!(run(&["laws", "everything"]).status.code(), Some(1));
    assert_eq!(
        run(&["ellsberg", "--variant", "X", "--alpha", "1.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["counterexample", "monad"]).status.code(), Some(1));
    assert_eq!(
        run(&["laws", "choquet", "--trials", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["tower", "--grid", "4", "--depth", "4", "--space-size", "3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn law_suites_pass() {
    for suite in [
        "choquet",
        "dirac",
        "monad",
        "substitution",
        "retraction",
        "ug-map",
        "unc-maps",
    ] {
        let doc = json(&["laws", suite, "--trials", "60", "--seed", "7"]);
        assert_eq!(doc["result"]["report"]["passed"], true, "{suite}");
    }
    let rows = csv_rows(&[
        "laws",
        "retraction",
        "--grid",
        "2",
        "--depth",
        "3",
        "--format",
        "csv",
    ]);
    assert!(rows.iter().all(|r| r[3] == "0"));
}

#[test]
fn counterexamples() {
    let doc = json(&["counterexample", "comonotonic"]);
    assert_eq!(doc["result"]["counterexample"]["product"], "-13/32");
    let one = json(&["counterexample", "monad", "--beta", "1"]);
    assert_eq!(one["result"]["counterexample"]["formula_difference"], "0");
    let two = json(&["counterexample", "monad", "--beta", "2"]);
    assert_eq!(two["result"]["counterexample"]["formula_difference"], "4/9");
    assert_eq!(two["result"]["matches"], true);
    let float = json(&[
        "counterexample",
        "monad",
        "--beta",
        "1.5",
        "--backend",
        "float",
    ]);
    assert_eq!(float["result"]["matches"], true);
}

#[test]
fn choquet_from_space_file() {
    let rows = csv_rows(&[
        "choquet",
        "--space-file",
        SPACE_FILE,
        "--capacity",
        "u1",
        "--act",
        "f",
        "--format",
        "csv",
    ]);
    assert_eq!(rows[0], ["u1", "f", "4"]);
    let rows = csv_rows(&[
        "choquet",
        "--space-file",
        SPACE_FILE,
        "--capacity",
        "w",
        "--act",
        "first",
        "--format",
        "csv",
    ]);
    assert_eq!(rows[0][2], "1/10");
    let missing = run(&[
        "choquet",
        "--space-file",
        SPACE_FILE,
        "--capacity",
        "u1",
        "--act",
        "nope",
    ]);
    assert_eq!(missing.status.code(), Some(1));
    let absent = run(&[
        "choquet",
        "--space-file",
        "/nonexistent.json",
        "--capacity",
        "u1",
        "--act",
        "f",
    ]);
    assert_eq!(absent.status.code(), Some(1));
}

#[test]
fn reports_embed_config_and_are_deterministic() {
    let args = ["laws", "unc-maps", "--seed", "11", "--trials", "40"];
    let a = run(&args);
    let b = Command::new(BIN)
        .args(args)
        .env("CHOQUET_TOWER_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    let config = &doc["config"];
    assert_eq!(config["seed"], 11);
    assert_eq!(config["trials"], 40);
    assert_eq!(config["backend"], "rational");
    assert_eq!(config["format"], "json");
    assert_eq!(config["tolerance"], 1e-9);

    let bad_threads = Command::new(BIN)
        .args(args)
        .env("CHOQUET_TOWER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(1));
}

#[test]
fn writes_to_out_path() {
    let dir = std::env::temp_dir().join(format!("choquet-tower-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tower.csv");
    let out = run(&["tower", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "level,size\n0,2\n1,3\n2,6\n3,21\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn paradox_branches_on_alpha() {
    let flat = json(&["paradox", "--alpha", "1"]);
    assert_eq!(flat["result"]["outcome"], "paradox-not-representable");
    let strict = json(&["paradox", "--alpha", "2"]);
    assert_eq!(strict["result"]["outcome"], "modal-preference-represented");
}
