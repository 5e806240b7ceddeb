use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn karate_file() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/karate.txt")
}

fn factions_file() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/karate_factions.csv")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bridgeness")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn embed_writes_one_row_per_node() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["embed", "--graph", s(&karate_file()), "--out", s(dir.path())]);
    let text = std::fs::read_to_string(dir.path().join("embedding.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 35);
    assert!(rows[1..].iter().all(|r| r.split(',').count() == 9));
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["graph"]["nodes"], 34);
    assert_eq!(manifest["graph"]["edges"], 78);
    assert_eq!(manifest["graph"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn same_config_gives_same_manifest_and_outputs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let strip = |dir: &Path| {
        let mut m = json(&dir.join("manifest.json"));
        m.as_object_mut().unwrap().remove("created_unix");
        m["config"].as_object_mut().unwrap().remove("out");
        m
    };
    for d in [&a, &b] {
        ok(&["embed", "--graph", s(&karate_file()), "--seed", "3", "--out", s(d.path())]);
    }
    assert_eq!(strip(a.path()), strip(b.path()));
    let read = |d: &Path| std::fs::read(d.join("embedding.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn missing_graph_is_a_usage_error() {
    let out = run(&["embed", "--graph", "/nonexistent/graph.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/graph.txt"));
    assert_eq!(run(&["embed", "--psi", "lots"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn degree_on_a_star_picks_the_centre() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("star.txt");
    std::fs::write(&g, "hub a\nhub b\nhub c\nhub d\n").unwrap();
    ok(&["explain", "--graph", s(&g), "--method", "degree", "--q", "1", "--out", s(dir.path())]);
    let e = json(&dir.path().join("explanation.json"));
    assert_eq!(e["top_nodes"], serde_json::json!(["hub"]));
}

#[test]
fn explain_reports_q_nodes_in_score_order() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["explain", "--graph", s(&karate_file()), "--method", "graph_wgd", "--q", "5", "--out", s(dir.path())]);
    let e = json(&dir.path().join("explanation.json"));
    assert_eq!(e["top_nodes"].as_array().unwrap().len(), 5);
    let scores: Vec<f64> = e["top_scores"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    let csv = std::fs::read_to_string(dir.path().join(e["scores_path"].as_str().unwrap())).unwrap();
    assert_eq!(csv.lines().next(), Some("node,score,rank"));
    assert_eq!(csv.lines().count(), 35);
}

#[test]
fn bridgeness_top_set_meets_known_bridges() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["explain", "--graph", s(&karate_file()), "--method", "bridgeness", "--k", "2", "--q", "5", "--out", s(dir.path())]);
    let e = json(&dir.path().join("explanation.json"));
    let top: Vec<&str> = e["top_nodes"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(top.iter().any(|v| ["0", "2", "33", "18", "20"].contains(v)), "{top:?}");
}

#[test]
fn verify_runs_only_the_requested_suite() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["verify", "--suite", "lemma_a1", "--instances", "5", "--out", s(dir.path())]);
    let r = json(&dir.path().join("verify.json"));
    let suites = r["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 1);
    assert_eq!(suites[0]["suite"], "lemma_a1");
    assert_eq!(suites[0]["instances"], 5);
    assert_eq!(r["passed"], true);
}

#[test]
fn verify_exit_code_follows_the_report() {
    let out = run(&["verify", "--instances", "3"]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["suites"].as_array().unwrap().len(), 9);
    let passed = r["passed"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if passed { 0 } else { 1 }));
}

#[test]
fn evaluate_writes_one_row_per_method_reproducibly() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        ok(&[
            "evaluate", "--graph", s(&karate_file()), "--labels", s(&factions_file()),
            "--method", "graph_gd,graph_wgd,degree", "--seeds", "0,1", "--out", s(d.path()),
        ]);
    }
    let table = std::fs::read_to_string(a.path().join("report.md")).unwrap();
    assert_eq!(table.lines().count(), 2 + 3);
    let report = json(&a.path().join("report.json"));
    assert_eq!(report.as_array().unwrap().len(), 3);
    for r in report.as_array().unwrap() {
        assert_eq!(r["ni"].as_object().unwrap().len(), 3);
        assert_eq!(r["pc"].as_object().unwrap().len(), 3);
        let rho = r["spearman"].as_f64().unwrap();
        assert!((-1.0..=1.0).contains(&rho));
    }
    let without_out = |d: &Path| {
        let mut r = json(&d.join("report.json"));
        for m in r.as_array_mut().unwrap() {
            m["config"].as_object_mut().unwrap().remove("out");
        }
        r
    };
    assert_eq!(without_out(a.path()), without_out(b.path()));
}

#[test]
fn evaluate_rejects_bad_z_and_missing_labels() {
    let g = karate_file();
    assert_eq!(run(&["evaluate", "--graph", s(&g), "--z", "0"]).status.code(), Some(2));
    assert_eq!(run(&["evaluate", "--graph", s(&g), "--z", "100.5"]).status.code(), Some(2));
    assert_eq!(run(&["evaluate", "--graph", s(&g), "--metrics", "pc"]).status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, format!("# test\ngraph = {}\ndim = 4\nwalks = 3\nseed = 9\n", s(&karate_file()))).unwrap();
    ok(&["embed", "--config", s(&conf), "--dim", "6", "--out", s(dir.path())]);
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["config"]["train"]["dim"], 6);
    assert_eq!(m["config"]["train"]["walks_per_node"], 3);
    assert_eq!(m["seeds"], serde_json::json!([9]));

    // config.txt replays the run
    let replay = tempfile::tempdir().unwrap();
    ok(&["embed", "--config", s(&dir.path().join("config.txt")), "--out", s(replay.path())]);
    let read = |d: &Path| std::fs::read(d.join("embedding.csv")).unwrap();
    assert_eq!(read(dir.path()), read(replay.path()));

    std::fs::write(&conf, "colour = blue\n").unwrap();
    assert_eq!(run(&["embed", "--config", s(&conf)]).status.code(), Some(2));
}

#[test]
fn explain_accepts_a_saved_embedding() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["embed", "--graph", s(&karate_file()), "--seed", "4", "--out", s(dir.path())]);
    let saved = dir.path().join("embedding.csv");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["explain", "--graph", s(&karate_file()), "--seed", "4", "--out", s(&a)]);
    ok(&["explain", "--graph", s(&karate_file()), "--seed", "4", "--embedding", s(&saved), "--out", s(&b)]);
    let top = |d: &Path| json(&d.join("explanation.json"))["top_nodes"].clone();
    assert_eq!(top(&a), top(&b));
}

#[test]
fn export_writes_perturbation_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["export", "--graph", s(&karate_file()), "--perturb", "0", "--alpha", "1", "--out", s(dir.path())]);
    for f in ["embedding.csv", "clusters.csv", "edges.csv", "perturbed_edges.csv", "perturbation.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let rec = json(&dir.path().join("perturbation.json"));
    assert_eq!(rec["pivot"], 0);
    let clusters = std::fs::read_to_string(dir.path().join("clusters.csv")).unwrap();
    assert_eq!(clusters.lines().next(), Some("node,cluster,bridgeness"));
    // every inter-cluster edge of node 0 is gone after a full perturbation
    let edges = std::fs::read_to_string(dir.path().join("perturbed_edges.csv")).unwrap();
    assert!(!edges.lines().any(|l| l.starts_with("0,") && l.ends_with(",true") && !l.starts_with("0,0,")));
}
