use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use trajcc_core::generator::TrajectoryDataset;
use trajcc_core::network::synthetic::DistrictLayout;

fn network() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/districts-4x4.net")
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trajcc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Small dataset plus matrix in `dir`.
fn prepare(dir: &Path) {
    let net = network();
    ok(dir, &["generate", "--network", net.to_str().unwrap(), "--classes", "3", "--grid-rows", "8", "--grid-cols", "8", "--seed", "42", "-o", "t.csv"]);
    ok(dir, &["matrix", "-i", "t.csv", "-o", "m.json"]);
}

/// ARI from all element pairs.
fn pair_ari(a: &[usize], b: &[String]) -> f64 {
    let (mut both, mut x, mut y, mut all) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let (p, q) = (a[i] == a[j], b[i] == b[j]);
            all += 1.0;
            x += p as u8 as f64;
            y += q as u8 as f64;
            both += (p && q) as u8 as f64;
        }
    }
    let expected = x * y / all;
    let max = (x + y) / 2.0;
    if max == expected {
        1.0
    } else {
        (both - expected) / (max - expected)
    }
}

#[test]
fn bundled_network_is_the_default_layout() {
    let text = std::fs::read_to_string(network()).unwrap();
    assert_eq!(text, DistrictLayout::default().build().to_text());
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["cocluster"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["cocluster", "-i", "x", "-o", "y", "--restarts", "many"]).status.code(), Some(1));
    let help = run(dir.path(), &["cocluster", "--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8(help.stdout).unwrap();
    for flag in ["--input", "--restarts", "--max-passes", "--output", "--seed", "--jobs"] {
        assert!(text.contains(flag), "help lacks {flag}");
    }
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["cocluster", "-i", "missing.json", "-o", "m.json"]).status.code(), Some(2));
    std::fs::write(dir.path().join("bad.csv"), "trajectory_id,class,segments\n0,a,x\n").unwrap();
    let out = run(dir.path(), &["matrix", "-i", "bad.csv", "-o", "m.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.csv:2"));
    assert!(!dir.path().join("m.json").exists());
}

#[test]
fn generate_writes_a_labeled_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let net = network();
    let line = ok(dir.path(), &["generate", "--network", net.to_str().unwrap(), "--classes", "5", "--seed", "42", "-o", "t.csv", "--plans", "p.json"]);
    assert!(line.starts_with("generate: ") && line.lines().count() == 1);
    let ds = TrajectoryDataset::load(dir.path().join("t.csv"), Some(&trajcc_core::network::RoadNetwork::load(&net).unwrap())).unwrap();
    let labels = ds.labels().expect("every trajectory labeled");
    let classes: std::collections::BTreeSet<_> = labels.into_iter().collect();
    assert_eq!(classes.len(), 5);
    let plans = json(&dir.path().join("p.json"));
    assert_eq!(plans["provenance"]["seed"], 42);
    assert_eq!(plans["classes"].as_array().unwrap().len(), 5);
}

#[test]
fn cocluster_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    prepare(dir.path());
    ok(dir.path(), &["cocluster", "-i", "t.csv", "--restarts", "10", "--seed", "7", "-o", "model.json"]);
    let first = std::fs::read(dir.path().join("model.json")).unwrap();
    ok(dir.path(), &["cocluster", "-i", "t.csv", "--restarts", "10", "--seed", "7", "--jobs", "3", "-o", "model.json"]);
    assert_eq!(first, std::fs::read(dir.path().join("model.json")).unwrap());
    let model = json(&dir.path().join("model.json"));
    assert_eq!(model["provenance"]["seed"], 7);
    assert_eq!(model["provenance"]["config"]["restarts"], 10);
    assert_eq!(model["search"]["run_costs"].as_array().unwrap().len(), 11);
}

#[test]
fn evaluate_reports_the_pair_counting_ari() {
    let dir = tempfile::tempdir().unwrap();
    prepare(dir.path());
    ok(dir.path(), &["cocluster", "-i", "m.json", "--restarts", "2", "-o", "model.json"]);
    let stdout = ok(dir.path(), &["evaluate", "--pred", "model.json", "--truth", "t.csv"]);
    let eval: Value = serde_json::from_str(&stdout).unwrap();

    let model = json(&dir.path().join("model.json"));
    let pred: Vec<usize> = serde_json::from_value(model["trajectory_clusters"].clone()).unwrap();
    let ds = TrajectoryDataset::load(dir.path().join("t.csv"), None).unwrap();
    let ids: Vec<u64> = serde_json::from_value(model["trajectory_ids"].clone()).unwrap();
    let truth: Vec<String> = ids
        .iter()
        .map(|id| ds.trajectories.iter().find(|t| t.id == *id).unwrap().label.clone().unwrap())
        .collect();
    let ari = eval["ari"].as_f64().unwrap();
    assert!((ari - pair_ari(&pred, &truth)).abs() < 1e-12);
    assert_eq!(eval["source"], "cocluster");
    assert_eq!(eval["trajectories"].as_u64().unwrap() as usize, truth.len());
}

#[test]
fn modularity_branch_composes() {
    let dir = tempfile::tempdir().unwrap();
    prepare(dir.path());
    let net = network();
    ok(dir.path(), &["project", "-i", "m.json", "--network", net.to_str().unwrap(), "-o", "g.csv"]);
    assert!(dir.path().join("g.json").exists());
    let line = ok(dir.path(), &["cluster", "-i", "g.csv", "-o", "c.json"]);
    assert!(line.contains("Q="));
    let c = json(&dir.path().join("c.json"));
    let k = c["k"].as_u64().unwrap();
    let q = c["modularity"].as_f64().unwrap();
    assert!(q >= c["cut_modularity"].as_f64().unwrap());
    let line = ok(dir.path(), &["evaluate", "--pred", "c.json", "--truth", "t.csv", "-o", "e.json"]);
    assert!(line.contains("ARI="));
    assert_eq!(json(&dir.path().join("e.json"))["clusters"].as_u64().unwrap(), k);
    // Any dendrogram level can be evaluated; the finest is all singletons.
    let n = c["node_ids"].as_array().unwrap().len().to_string();
    ok(dir.path(), &["evaluate", "--pred", "c.json", "--truth", "t.csv", "--cut", &n, "-o", "e.json"]);
    assert_eq!(json(&dir.path().join("e.json"))["all_pure"], true);

    // Projecting trajectories needs segment lengths.
    assert_eq!(run(dir.path(), &["project", "-i", "m.json", "-o", "g2.csv"]).status.code(), Some(1));
}

#[test]
fn report_sections_and_image() {
    let dir = tempfile::tempdir().unwrap();
    prepare(dir.path());
    ok(dir.path(), &["cocluster", "-i", "m.json", "--restarts", "1", "-o", "model.json"]);
    ok(dir.path(), &["report", "--model", "model.json", "-i", "m.json", "--unit", "bits", "--pgm", "x.pgm", "-o", "r.json"]);
    let r = json(&dir.path().join("r.json"));
    let cells = r["mutual_information"]["cells"].as_array().unwrap();
    let total: f64 = cells.iter().map(|c| c["mi"].as_f64().unwrap()).sum();
    assert!((total - r["mutual_information"]["total"].as_f64().unwrap()).abs() < 1e-12);
    assert_eq!(r["mutual_information"]["unit"], "bits");
    assert!(std::fs::read(dir.path().join("x.pgm")).unwrap().starts_with(b"P5\n"));

    ok(dir.path(), &["report", "--model", "model.json", "-i", "m.json", "--sections", "mi", "-o", "r.json"]);
    assert!(json(&dir.path().join("r.json")).get("crossed").is_none());
    // A model does not fit a different matrix.
    let net = network();
    ok(dir.path(), &["generate", "--network", net.to_str().unwrap(), "--classes", "2", "--seed", "1", "-o", "other.csv"]);
    assert_eq!(run(dir.path(), &["report", "--model", "model.json", "-i", "other.csv"]).status.code(), Some(2));
}
