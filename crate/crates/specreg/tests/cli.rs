use std::path::Path;
use std::process::{Command, Output};

fn specreg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specreg"))
        .current_dir(dir)
        .env("SPECREG_THREADS", "2")
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = specreg(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn generate_embed_cluster_eval() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--model", "cliques", "--sizes", "5,3,2", "--graph", "g.tsv", "--labels", "l.tsv"]);
    ok(d, &["embed", "--graph", "g.tsv", "--dim", "2", "--alpha", "1", "--alpha-mode", "absolute", "--out", "e.csv"]);
    let meta = std::fs::read_to_string(d.join("e.csv.meta")).unwrap();
    assert!(meta.contains("alpha = 1"));
    assert!(std::fs::read_to_string(d.join("e.csv")).unwrap().starts_with("node,dim_1,dim_2\n"));
    ok(d, &["cluster", "--embedding", "e.csv", "--k", "3", "--out", "p.tsv"]);
    let report = ok(d, &["eval", "--graph", "g.tsv", "--pred", "p.tsv", "--truth", "l.tsv"]);
    assert!(report.contains("ARI\t1.000000"), "{report}");
    assert!(report.contains("Q\t"));
}

#[test]
fn string_ids_and_masked_eval() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("g.tsv"), "a\tb\nb\tc\nc\ta\nx\ty\ny\tz\nz\tx\nn1\tn1\n").unwrap();
    std::fs::write(d.join("truth.tsv"), "a\tp\nb\tp\nc\tp\nx\tq\ny\tq\nz\tq\n").unwrap();
    ok(d, &["embed", "--graph", "g.tsv", "--dim", "2", "--out", "e.csv"]);
    let csv = std::fs::read_to_string(d.join("e.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("a,"));
    ok(d, &["cluster", "--embedding", "e.csv", "--k", "3", "--out", "p.tsv"]);
    let out = specreg(d, &["eval", "--graph", "g.tsv", "--pred", "p.tsv", "--truth", "truth.tsv"]);
    assert_eq!(out.status.code(), Some(2));
    let report = ok(d, &["eval", "--graph", "g.tsv", "--pred", "p.tsv", "--truth", "truth.tsv", "--mask", "original"]);
    assert!(report.contains("V\t1.000000"), "{report}");
}

#[test]
fn bipartite_generate_and_embed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &["generate", "--model", "bipartite", "--n-sizes", "6,4", "--m-sizes", "5,3", "--graph", "b.tsv",
          "--labels", "r.tsv", "--col-labels", "c.tsv"],
    );
    ok(d, &["embed", "--graph", "b.tsv", "--bipartite", "--dim", "1", "--out", "e.csv"]);
    let csv = std::fs::read_to_string(d.join("e.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 10 + 8);
    assert!(csv.contains("\ncol:0,"));
}

#[test]
fn theory_prints_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let s = ok(dir.path(), &["theory", "--sizes", "5,3,2", "--alpha", "1"]);
    assert!(s.contains("mu (sorted): 0.666667, 0.769231, 0.833333"), "{s}");
    assert!(s.contains("secular roots: 0.724819, 0.813642"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // bad input
    std::fs::write(d.join("bad.tsv"), "0 1 x\n").unwrap();
    assert_eq!(specreg(d, &["embed", "--graph", "bad.tsv", "--out", "e.csv"]).status.code(), Some(2));
    std::fs::write(d.join("bad.cfg"), "frobnicate = 1\n").unwrap();
    assert_eq!(specreg(d, &["experiment", "--config", "bad.cfg", "--out", "o"]).status.code(), Some(2));
    // zero-degree node without regularization under the rejecting policy
    std::fs::write(d.join("iso.tsv"), "# nodes 3\n0 1\n").unwrap();
    let out = specreg(d, &["embed", "--graph", "iso.tsv", "--dim", "1", "--alpha", "0", "--out", "e.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn experiment_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("sweep.cfg"),
        "experiment = noise_sweep\nsizes = 15*4\np_in = 0.5\np_out = 0.02\ndim = 4\nalpha = 0, 1\nnoise = 0, 0.1\nrepeats = 2\n",
    )
    .unwrap();
    ok(d, &["experiment", "--config", "sweep.cfg", "--out", "a"]);
    ok(d, &["experiment", "--config", "sweep.cfg", "--out", "b"]);
    for f in ["noise_sweep.md", "noise_sweep.csv"] {
        let a = std::fs::read(d.join("a").join(f)).unwrap();
        let b = std::fs::read(d.join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    std::fs::write(d.join("toy.cfg"), "experiment = toy\n").unwrap();
    ok(d, &["experiment", "--config", "toy.cfg", "--out", "t"]);
    assert!(std::fs::read_to_string(d.join("t/toy.txt")).unwrap().contains("-0.0756"));
}
