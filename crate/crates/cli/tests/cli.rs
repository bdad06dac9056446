use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn bidual(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bidual"))
        .args(args)
        .env_remove("DUALITY_CAPS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn separate_on_two_chain() {
    let path = fixture("chain2.bea.json");
    let o = bidual(&["separate", "--in", path.to_str().unwrap(), "--a", "1", "--b", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "U=[1]");
}

#[test]
fn separate_json_report() {
    let path = fixture("chain2.bea.json");
    let o = bidual(&["--format", "json", "separate", "--in", path.to_str().unwrap(), "--a", "1", "--b", "0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["U"], serde_json::json!([1]));
    assert_eq!(v["verdict"], "pass");
}

#[test]
fn corrupted_pasch_is_reported() {
    let path = fixture("corrupted.bea.json");
    let o = bidual(&["--format", "json", "check-axioms", "--in", path.to_str().unwrap(), "--axioms", "i3"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = &v["axioms"][0];
    assert_eq!(r["axiom"], "i3");
    assert_eq!(r["pass"], false);
    assert_eq!(r["witness"], serde_json::json!([[], [2], [0], [], [1]]));

    let o = bidual(&["separate", "--in", path.to_str().unwrap(), "--a", "0", "--b", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn priestley_suite_passes() {
    let o = bidual(&["verify", "--suite", "priestley", "--max-size", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("suite priestley: PASS"));
    assert!(out.lines().any(|l| l.trim_start().starts_with("pass  poset")));
}

#[test]
fn json_reports_are_byte_identical() {
    let args = ["--format", "json", "verify", "--suite", "biconvex", "--max-size", "4", "--samples", "5", "--seed", "7"];
    let a = bidual(&args);
    let b = bidual(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes_for_usage_and_caps() {
    assert_eq!(bidual(&["bogus"]).status.code(), Some(2));
    assert_eq!(bidual(&["separate", "--in", "/nonexistent", "--a", "0", "--b", "1"]).status.code(), Some(2));
    let path = fixture("chain2.bea.json");
    let p = path.to_str().unwrap();
    assert_eq!(bidual(&["reflexivity", "--in", p, "--template", "ultimate"]).status.code(), Some(0));
    let o = bidual(&["reflexivity", "--in", p, "--template", "ultimate", "--caps", "bidual_x=1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn caps_from_environment() {
    let path = fixture("chain2.bea.json");
    let o = Command::new(env!("CARGO_BIN_EXE_bidual"))
        .args(["reflexivity", "--in", path.to_str().unwrap(), "--template", "ultimate"])
        .env("DUALITY_CAPS", "bidual_x=1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn gen_writes_corpus_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("posets.jsonl");
    let o = bidual(&["gen", "--class", "poset", "--size", "3", "--exhaustive", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let meta: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(meta["kind"], "corpus-meta");
    assert_eq!(meta["generator"], "poset");
    // Labelled posets on 3 points.
    assert_eq!(lines.len() - 1, 19);
}

#[test]
fn dual_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dual.json");
    let path = fixture("chain2.bea.json");
    let o = bidual(&["dual", "--in", path.to_str().unwrap(), "--template", "ultimate", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["kind"], "bea");
    // Halfspaces of the 2-chain: ∅, {1}, {0,1}.
    assert_eq!(doc["universe"], 3);
}
