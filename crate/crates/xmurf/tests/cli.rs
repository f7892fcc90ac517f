use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;
use xmurf::io::{load_permutation, load_forest, save_dataset, MatrixFormat, load_matrix};
use xmurf::xmurf_core::Dataset;

fn xmurf(dir: &Path, args: &[&str]) -> Output {
    let cfg = dir.join("cfg.toml");
    if !cfg.exists() {
        std::fs::write(&cfg, format!("[paths]\nwork_dir = {:?}\n", dir.to_str().unwrap())).unwrap();
    }
    Command::new(env!("CARGO_BIN_EXE_xmurf"))
        .arg("--config")
        .arg(&cfg)
        .args(args)
        .output()
        .unwrap()
}

fn ok(out: Output) -> Output {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

/// Two well separated groups of four-feature rows.
fn blobs(dir: &Path, m: usize) -> std::path::PathBuf {
    let rows = (0..m)
        .map(|i| {
            let c = if i % 2 == 0 { 0.0 } else { 10.0 };
            (0..4).map(|j| c + ((i * 7 + j * 3) % 5) as f64 * 0.1).collect()
        })
        .collect();
    let path = dir.join("scenarios.csv");
    save_dataset(&Dataset::from_rows(rows).unwrap(), &path).unwrap();
    path
}

#[test]
fn simulate_writes_numbered_traces_reproducibly() {
    let dir = tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.toml"),
        format!("seed = 9\n[sim]\nruns = 3\nduration = 10.0\n[paths]\nwork_dir = {:?}\n", dir.path().to_str().unwrap()),
    )
    .unwrap();
    ok(xmurf(dir.path(), &["simulate"]));
    let traces = dir.path().join("traces");
    let read = |k: usize| std::fs::read(traces.join(format!("trace_{k}.jsonl"))).unwrap();
    let first: Vec<Vec<u8>> = (0..3).map(read).collect();
    assert!(!traces.join("trace_3.jsonl").exists());
    ok(xmurf(dir.path(), &["simulate"]));
    assert_eq!(first, (0..3).map(read).collect::<Vec<_>>());
    ok(xmurf(dir.path(), &["--seed", "10", "simulate"]));
    assert_ne!(first[0], read(0));
}

#[test]
fn invalid_configuration_exits_2() {
    let dir = tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.toml"), "[road]\nlanes = 4\n").unwrap();
    let out = xmurf(dir.path(), &["simulate"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("lane count"));
    assert_eq!(code(&xmurf(dir.path(), &["frobnicate"])), 2);
}

#[test]
fn extract_without_scenarios_exits_3() {
    let dir = tempdir().unwrap();
    let empty = dir.path().join("none");
    std::fs::create_dir(&empty).unwrap();
    assert_eq!(code(&xmurf(dir.path(), &["extract", empty.to_str().unwrap()])), 3);
}

#[test]
fn extract_emits_47_features_with_unique_ids() {
    let dir = tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.toml"),
        format!("seed = 1\n[sim]\nruns = 3\nduration = 120.0\n[paths]\nwork_dir = {:?}\n", dir.path().to_str().unwrap()),
    )
    .unwrap();
    ok(xmurf(dir.path(), &["simulate"]));
    ok(xmurf(dir.path(), &["extract"]));
    let text = std::fs::read_to_string(dir.path().join("scenarios.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap().split(',').count(), 48);
    let ids: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert!(!ids.is_empty());
    let unique: std::collections::BTreeSet<_> = ids.iter().collect();
    assert_eq!(unique.len(), ids.len());
    assert!(ids.iter().all(|id| id.starts_with("trace_")));
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("scenarios.meta.json")).unwrap()).unwrap();
    assert_eq!(meta.as_array().unwrap().len(), ids.len());
    for key in ["id", "ego_id", "t_start", "t_end", "thw_min"] {
        assert!(meta[0].get(key).is_some(), "{key}");
    }
}

#[test]
fn cluster_contract() {
    let dir = tempdir().unwrap();
    blobs(dir.path(), 100);
    ok(xmurf(dir.path(), &["cluster", "--trees", "50"]));
    let p = load_matrix(&dir.path().join("proximity.bin"), MatrixFormat::Raw).unwrap();
    assert_eq!(p.len(), 100);
    assert_eq!(load_matrix(&dir.path().join("proximity.csv"), MatrixFormat::Csv).unwrap(), p);
    assert_eq!(load_forest(&dir.path().join("forest.json")).unwrap().n_trees(), 50);

    let other = dir.path().join("other");
    ok(xmurf(dir.path(), &["--seed", "1", "cluster", "--trees", "50", "--out", other.to_str().unwrap()]));
    let q = load_matrix(&other.join("proximity.bin"), MatrixFormat::Raw).unwrap();
    assert_ne!(p.values(), q.values());

    blobs(dir.path(), 1);
    assert_eq!(code(&xmurf(dir.path(), &["cluster"])), 2);
}

#[test]
fn order_label_train_classify_contract() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    blobs(d, 40);
    ok(xmurf(d, &["cluster", "--trees", "40"]));
    ok(xmurf(d, &["order", "--suggest", "2"]));

    let heat = std::fs::read(d.join("heatmap.ppm")).unwrap();
    assert!(heat.starts_with(b"P6\n40 40\n255\n"));
    assert_eq!(heat.len(), b"P6\n40 40\n255\n".len() + 40 * 40 * 3);
    let perm = load_permutation(&d.join("permutation.json")).unwrap();
    let mut sorted = perm.order.clone();
    sorted.sort();
    assert_eq!(sorted, (0..40).collect::<Vec<_>>());
    let dendro: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("dendrogram.json")).unwrap()).unwrap();
    assert_eq!(dendro["merges"].as_array().unwrap().len(), 39);

    // full cover with verbatim labels
    std::fs::write(
        d.join("ranges.json"),
        r#"[{"start": 0, "end": 19, "label": "Cut-in, left"}, {"start": 20, "end": 39, "label": "Follow"}]"#,
    )
    .unwrap();
    ok(xmurf(d, &["label"]));
    let labeled = std::fs::read_to_string(d.join("labeled.csv")).unwrap();
    assert_eq!(labeled.lines().count(), 41);
    assert!(labeled.contains("\"Cut-in, left\""));

    // overlapping ranges are refused
    std::fs::write(
        d.join("bad.json"),
        r#"[{"start": 0, "end": 20, "label": "a"}, {"start": 20, "end": 39, "label": "b"}]"#,
    )
    .unwrap();
    let out = xmurf(d, &["label", "--ranges", d.join("bad.json").to_str().unwrap(), "--out", d.join("x.csv").to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    ok(xmurf(d, &["train", "--trees", "30"]));
    let mut unassigned = Vec::new();
    for ratio in ["1.0", "0.75", "0.5", "0.25", "0"] {
        ok(xmurf(d, &["classify", "--ratio", ratio]));
        let text = std::fs::read_to_string(d.join("predictions.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "id,label,vote_fraction,threshold_used");
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 40);
        unassigned.push(rows.iter().filter(|r| r.contains(",UNASSIGNED,")).count());
    }
    assert!(unassigned.windows(2).all(|w| w[0] >= w[1]), "{unassigned:?}");
    assert_eq!(*unassigned.last().unwrap(), 0);
}

#[test]
fn order_works_on_two_points_and_render_matches() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("m.csv"), "a,b\n1.0,0.4\n0.4,1.0\n").unwrap();
    ok(xmurf(d, &["order", "--matrix", d.join("m.csv").to_str().unwrap()]));
    assert_eq!(load_permutation(&d.join("permutation.json")).unwrap().order, vec![0, 1]);
    ok(xmurf(d, &[
        "render",
        "--matrix", d.join("m.csv").to_str().unwrap(),
        "--permutation", d.join("permutation.json").to_str().unwrap(),
        "--out", d.join("r.ppm").to_str().unwrap(),
    ]));
    assert_eq!(std::fs::read(d.join("r.ppm")).unwrap(), std::fs::read(d.join("heatmap.ppm")).unwrap());

    std::fs::write(d.join("bad.csv"), "a,b\n1.0,0.4\n0.3,1.0\n").unwrap();
    assert_eq!(code(&xmurf(d, &["order", "--matrix", d.join("bad.csv").to_str().unwrap()])), 2);
}

#[test]
fn missing_files_exit_1() {
    let dir = tempdir().unwrap();
    assert_eq!(code(&xmurf(dir.path(), &["cluster"])), 1);
}
