use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn netstruct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netstruct"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = netstruct(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn homophyly_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("h.txt");
    let colors = dir.path().join("h.colors.json");
    ok(&["--seed", "7", "--out", s(&graph), "generate", "--model", "homophyly", "--n", "1500", "--a", "1.2", "--d", "4"]);
    assert!(colors.exists());

    let report: Value = serde_json::from_str(&ok(&["verify", "--graph", s(&graph), "--colors", s(&colors)])).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["node_count"], 1500);
    assert_eq!(report["seed_count_matches_colors"], true);

    for algo in ["c", "m", "e"] {
        let part = dir.path().join(format!("{algo}.json"));
        ok(&["--out", s(&part), "detect", "--graph", s(&graph), "--algo", algo]);
        let file = json(&part);
        assert_eq!(file["schema_version"], 1);
        assert!(!file["communities"].as_array().unwrap().is_empty());
    }
    let metrics: Value = serde_json::from_str(&ok(&[
        "metrics",
        "--graph",
        s(&graph),
        "--partition",
        s(&dir.path().join("m.json")),
        "--communities",
        s(&dir.path().join("c.json")),
    ]))
    .unwrap();
    assert!(metrics["sigma"].as_f64().unwrap() > 0.3);
    assert!(metrics["tau"].as_f64().unwrap() > 0.0);
    assert!(metrics["theta"]["theta"].as_f64().unwrap() > 0.3);
    assert_eq!(metrics["criterion"], true);
}

#[test]
fn generation_is_reproducible_from_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);
    for (name, seed) in [("a.txt", "5"), ("b.txt", "5"), ("c.txt", "6")] {
        ok(&["--seed", seed, "--out", s(&path(name)), "generate", "--model", "pa", "--n", "300", "--d", "3"]);
    }
    let read = |name: &str| fs::read_to_string(path(name)).unwrap();
    assert_eq!(read("a.txt"), read("b.txt"));
    assert_ne!(read("a.txt"), read("c.txt"));
}

#[test]
fn convert_is_idempotent_and_dedups_arcs() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.txt");
    fs::write(&raw, "# FromNodeId\tToNodeId\n10\t20\n20\t10\n20\t30\n30\t30\n").unwrap();
    let once = dir.path().join("once.json");
    let twice = dir.path().join("twice.json");
    ok(&["--out", s(&once), "convert", s(&raw)]);
    ok(&["--out", s(&twice), "convert", s(&once)]);
    assert_eq!(fs::read(&once).unwrap(), fs::read(&twice).unwrap());
    let bundle = json(&once);
    assert_eq!(bundle["n"], 3);
    assert_eq!(bundle["edges"].as_array().unwrap().len(), 2);
    assert_eq!(bundle["id_map"], serde_json::json!(["10", "20", "30"]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1 2\n3\n").unwrap();
    let out = netstruct(&["convert", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2"));

    assert_eq!(netstruct(&["convert", s(&dir.path().join("missing.txt"))]).status.code(), Some(1));
    assert_eq!(netstruct(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(netstruct(&["generate", "--model", "er", "--n", "10", "--p", "0.1"]).status.code(), Some(1));
    assert_eq!(netstruct(&["--help"]).status.code(), Some(0));

    // A directory where a file is expected is not an input problem.
    let out = netstruct(&["--out", s(dir.path()), "generate", "--model", "er", "--n", "10", "--p", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn predict_writes_curve_and_details() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let mut edges = String::new();
    for c in 0..2 {
        for i in 0..6 {
            for j in i + 1..6 {
                edges += &format!("n{} n{}\n", c * 6 + i, c * 6 + j);
            }
        }
    }
    edges += "n0 n6\n";
    fs::write(&graph, edges).unwrap();
    let meta = dir.path().join("meta.jsonl");
    let mut lines = String::new();
    for v in 0..12 {
        let topic = if v < 6 { "graph mining" } else { "protein folding" };
        if v % 6 < 3 {
            lines += &format!("{{\"id\": \"n{v}\", \"title\": \"t\", \"abstract\": \"\", \"keywords\": [\"{topic}\"]}}\n");
        } else {
            lines += &format!("{{\"id\": \"n{v}\", \"title\": \"On {topic}\", \"abstract\": \"x\", \"keywords\": []}}\n");
        }
    }
    fs::write(&meta, lines).unwrap();
    let communities = dir.path().join("c.json");
    fs::write(&communities, "[[0,1,2,3,4,5],[6,7,8,9,10,11]]").unwrap();
    let out = dir.path().join("pred");
    ok(&[
        "--out", s(&out), "predict", "--graph", s(&graph), "--meta", s(&meta), "--communities", s(&communities), "--kmax", "3",
    ]);
    let csv = fs::read_to_string(out.join("prediction_curve.csv")).unwrap();
    assert_eq!(csv, "k,covered\n1,6\n2,6\n3,6\n");
    let report = json(&out.join("predictions.json"));
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["confirmed"]["n9"], serde_json::json!(["protein folding"]));
}

#[test]
fn experiment_writes_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("two_triangles.txt");
    fs::write(&data, "a b\nb c\nc a\nc d\nd e\ne f\nf d\n").unwrap();
    let out = dir.path().join("results");
    let dataset = format!("tri={}", s(&data));
    let stdout = ok(&["--out", s(&out), "--threads", "2", "experiment", "table1", "--dataset", &dataset]);
    assert!(stdout.trim().ends_with("table1_manifest.json"));
    let manifest = json(&out.join("table1_manifest.json"));
    assert_eq!(manifest["rows"], 1);
    assert!(manifest["input_digests"].as_object().unwrap().len() == 1);
    let csv = fs::read_to_string(out.join("table1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);

    assert_eq!(netstruct(&["experiment", "table1"]).status.code(), Some(1));
    assert_eq!(netstruct(&["experiment", "fig9"]).status.code(), Some(1));
}
