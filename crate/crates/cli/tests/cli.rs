use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn citerank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_citerank"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = citerank(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty(), "data belongs in files, not stdout");
}

fn read(path: impl AsRef<Path>) -> String {
    fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

fn golden_corpus() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/data/golden_corpus.tsv").to_string()
}

/// Training lines carry their label in a single telling word; the test lines
/// reuse those words so a correct tree scores perfectly.
fn separable_corpus(dir: &Path) -> PathBuf {
    let mut text = String::new();
    for i in 0..4 {
        text.push_str(&format!("S{i}\tT1\tp\tThis is an effective approach to parsing\n"));
        text.push_str(&format!("S{i}\tT2\to\tWe follow the setup described in that work\n"));
        text.push_str(&format!("S{i}\tT3\tn\tTheir method suffers from a lack of coverage\n"));
    }
    text.push_str("X1\tT1\tp\tAn effective treatment of the topic\n");
    text.push_str("X1\tT2\to\tThe corpus comes from that work\n");
    text.push_str("X1\tT3\tn\tA lack of data limits their results\n");
    let path = dir.join("corpus.tsv");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn missing_lexicon_exits_with_code_2() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("no-such-lexicon.tsv");
    let out = citerank(&[
        "train",
        "--corpus",
        &golden_corpus(),
        "--split",
        "8",
        "--lexicon-swn",
        missing.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-lexicon.tsv"));
    assert!(!dir.path().join("model.tree").exists());
}

#[test]
fn training_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let corpus = golden_corpus();
    let mut models = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        ok(&["train", "--corpus", &corpus, "--split", "8", "--out", out.to_str().unwrap()]);
        models.push((fs::read(out.join("model.tree")).unwrap(), read(out.join("training_summary.json"))));
    }
    assert_eq!(models[0], models[1]);
    assert!(models[0].1.contains("\"positive\": 2"));
}

#[test]
fn perfect_test_set_reports_accuracy_one() {
    let dir = TempDir::new().unwrap();
    let corpus = separable_corpus(dir.path());
    let (c, o) = (corpus.to_str().unwrap(), dir.path().to_str().unwrap());
    ok(&["train", "--corpus", c, "--split", "12", "--out", o]);
    ok(&["evaluate", "--corpus", c, "--split", "12", "--out", o]);
    let report: serde_json::Value = serde_json::from_str(&read(dir.path().join("evaluation.json"))).unwrap();
    assert_eq!(report["accuracy"], 1.0);
    assert!(read(dir.path().join("evaluation.txt")).contains("accuracy 1.0000"));

    ok(&["classify", "--corpus", c, "--subset", "test", "--split", "12", "--out", o]);
    let predictions = read(dir.path().join("predictions.tsv"));
    assert_eq!(predictions.lines().skip(1).map(|l| l.split('\t').nth(2).unwrap()).collect::<String>(), "pon");
    assert_eq!(read(dir.path().join("features.csv")).lines().count(), 5);
}

#[test]
fn baseline_flag_needs_no_model() {
    let dir = TempDir::new().unwrap();
    let o = dir.path().to_str().unwrap();
    ok(&["evaluate", "--baseline", "--corpus", &golden_corpus(), "--split", "8", "--out", o]);
    let report: serde_json::Value = serde_json::from_str(&read(dir.path().join("evaluation.json"))).unwrap();
    assert!(report.get("confusion").is_none());
    assert!(report.get("accuracy").is_none());
    assert_eq!(report["baseline"]["per_class"]["neutral"]["recall"], 1.0);
}

#[test]
fn drop_one_ablation_has_six_rows() {
    let dir = TempDir::new().unwrap();
    let o = dir.path().to_str().unwrap();
    ok(&["evaluate", "--ablate", "drop-one", "--corpus", &golden_corpus(), "--split", "8", "--out", o]);
    let csv = read(dir.path().join("ablation_drop-one.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("Feature eliminated,"));
    assert!(lines[1].starts_with("SWN Lexicon,"));
    assert!(lines[6].starts_with("Opinion Lexicon 2,"));
}

#[test]
fn three_node_graph_matches_hand_lists() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("graph.tsv");
    fs::write(&corpus, "A\tB\tp\tgood\nA\tC\to\tused\nB\tC\tn\tbad\n").unwrap();
    let o = dir.path().join("out");
    ok(&["rank", "--corpus", corpus.to_str().unwrap(), "--buckets", "2", "--out", o.to_str().unwrap()]);
    assert_eq!(read(o.join("naive_ranking.csv")), "rank,paper_id,score,bucket\n1,C,2,1\n2,B,1,2\n");
    assert_eq!(read(o.join("m_index_ranking.csv")), "rank,paper_id,score,bucket\n1,B,1,1\n2,C,0,2\n");
    let summary: serde_json::Value = serde_json::from_str(&read(o.join("rank_diff_summary.json"))).unwrap();
    assert_eq!(summary["rank_changes"], 2);
    assert_eq!(summary["bucket_changes"], 2);
    assert_eq!(summary["kendall_tau"], -1.0);

    // compare on the written files reproduces the same report
    let c = dir.path().join("cmp");
    ok(&[
        "compare",
        o.join("naive_ranking.csv").to_str().unwrap(),
        o.join("m_index_ranking.csv").to_str().unwrap(),
        "--out",
        c.to_str().unwrap(),
    ]);
    assert_eq!(read(c.join("rank_diff.csv")), read(o.join("rank_diff.csv")));
}

#[test]
fn gold_and_predicted_polarity_differ_and_repeat() {
    let dir = TempDir::new().unwrap();
    let corpus = separable_corpus(dir.path());
    let c = corpus.to_str().unwrap();
    let model = dir.path().join("model.tree");
    let m = model.to_str().unwrap();
    // trained on one positive line, the tree labels everything positive; the
    // raised negative thresholds keep the cascade from overriding it
    ok(&["train", "--corpus", c, "--split", "1", "--model", m, "--out", dir.path().to_str().unwrap()]);

    let run = |mode: &str, name: &str| {
        let out = dir.path().join(name);
        let o = out.to_str().unwrap();
        ok(&["rank", "--corpus", c, "--polarity", mode, "--model", m, "--n1", "5", "--n2", "5", "--out", o]);
        read(out.join("m_index_ranking.csv"))
    };
    let gold = run("gold", "gold1");
    let predicted = run("predicted", "pred1");
    assert_ne!(gold, predicted);
    assert_eq!(gold, run("gold", "gold2"));
    assert_eq!(predicted, run("predicted", "pred2"));
}

#[test]
fn model_from_another_feature_order_is_rejected() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("model.tree");
    fs::write(&model, "citerank-tree v1\nfeatures 0000000000000000\nnodes 1\nleaf 0 1 0\n").unwrap();
    let out = citerank(&[
        "evaluate",
        "--corpus",
        &golden_corpus(),
        "--split",
        "8",
        "--model",
        model.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("feature order mismatch"));
    assert!(!dir.path().join("evaluation.json").exists());
}

#[test]
fn empty_corpus_cannot_be_ranked() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("empty.tsv");
    fs::write(&corpus, "").unwrap();
    let out = citerank(&["rank", "--corpus", corpus.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no citation instances"));
}

#[test]
fn config_file_sets_defaults_that_flags_override() {
    let dir = TempDir::new().unwrap();
    fs::copy(golden_corpus(), dir.path().join("corpus.tsv")).unwrap();
    let config = dir.path().join("run.conf");
    fs::write(&config, "# golden run\ncorpus = corpus.tsv\nsplit = 8\nout = from-config\nbuckets = 3\n").unwrap();
    ok(&["train", "--config", config.to_str().unwrap()]);
    assert!(dir.path().join("from-config/model.tree").exists());

    let flag_out = dir.path().join("from-flag");
    ok(&["rank", "--config", config.to_str().unwrap(), "--out", flag_out.to_str().unwrap()]);
    let buckets: std::collections::BTreeSet<String> = read(flag_out.join("naive_ranking.csv"))
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().to_string())
        .collect();
    assert_eq!(buckets.len(), 3);
}
