use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use citerank::classifier::{grid_search, postprocess, DecisionTree, Prediction};
use citerank::corpus::{load_corpus, CitationInstance, ClassCounts, CorpusFormat, Polarity};
use citerank::evaluation::{ablation, write_ablation_csv, AblationMode, EvaluationReport, FeatureGroup};
use citerank::features::{extract_all, feature_order_hash, load_annotations, write_feature_matrix, FeatureVector};
use citerank::lexicons::{LexiconBundle, NGramLexicon, OpinionLabel, OpinionLexiconPair, ScoredLexicon};
use citerank::ranking::{
    bucketize, build_graph, compare_rankings, m_index, naive_rank, read_ranking_csv, write_plot_data,
    write_rank_diff_csv, write_ranking_csv, write_ranking_json, RankDiffReport, RankedList, RankingMethod,
};
use serde::Serialize;

use crate::config::{PolaritySource, RunConfig, Subset};

type Vector = FeatureVector<f64>;

fn load_bundle(cfg: &RunConfig) -> Result<LexiconBundle> {
    let l = &cfg.lexicons;
    let mut bundle = LexiconBundle::with_default_citation_lists();
    if let Some(p) = &l.swn {
        bundle.scored = ScoredLexicon::load(p)?;
    }
    if let Some(p) = &l.pos_ngrams {
        bundle.positive_ngrams = NGramLexicon::load(p, Polarity::Positive)?;
    }
    if let Some(p) = &l.neg_words {
        bundle.negative_words = NGramLexicon::load(p, Polarity::Negative)?;
    }
    if let Some((p, n)) = &l.ol1 {
        bundle.ol1 = OpinionLexiconPair::load(p, n, OpinionLabel::Ol1)?;
    }
    if let Some((p, n)) = &l.ol2 {
        bundle.ol2 = OpinionLexiconPair::load(p, n, OpinionLabel::Ol2)?;
    }
    Ok(bundle)
}

fn subset_range(len: usize, subset: Subset, split: usize) -> Result<Range<usize>> {
    if subset != Subset::All && split > len {
        return Err(citerank::Error::SplitOutOfRange { n_train: split, len }.into());
    }
    Ok(match subset {
        Subset::All => 0..len,
        Subset::Training => 0..split,
        Subset::Test => split..len,
    })
}

fn gold_of(instances: &[CitationInstance], offset: usize) -> Result<Vec<Polarity>> {
    let gold: Result<Vec<_>, _> = instances
        .iter()
        .enumerate()
        .map(|(i, inst)| inst.gold.ok_or(citerank::Error::MissingGold { index: offset + i }))
        .collect();
    Ok(gold?)
}

/// The whole corpus with its feature vectors, in file order.
struct Dataset {
    instances: Vec<CitationInstance>,
    vectors: Vec<Vector>,
}

impl Dataset {
    fn load(cfg: &RunConfig) -> Result<Self> {
        let Some(corpus) = &cfg.corpus else {
            bail!("--corpus is required");
        };
        let instances = load_corpus(corpus, CorpusFormat::Tsv)?;
        let annotations = cfg.annotations.as_ref().map(load_annotations).transpose()?;
        let bundle = load_bundle(cfg)?;
        let vectors = extract_all(&instances, annotations.as_deref(), &bundle)?;
        Ok(Dataset { instances, vectors })
    }

    fn range(&self, subset: Subset, split: usize) -> Result<Range<usize>> {
        subset_range(self.instances.len(), subset, split)
    }

    /// Vectors and gold labels of a labelled range.
    fn labelled(&self, range: Range<usize>) -> Result<(&[Vector], Vec<Polarity>)> {
        let gold = gold_of(&self.instances[range.clone()], range.start)?;
        Ok((&self.vectors[range], gold))
    }
}

fn write_output(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn counts_of(instances: &[CitationInstance]) -> ClassCounts {
    ClassCounts::from_labels(instances.iter().filter_map(|i| i.gold.as_ref()))
}

#[derive(Serialize)]
struct TrainingSummary {
    feature_order: String,
    split: usize,
    training: ClassCounts,
    test: ClassCounts,
    nodes: usize,
    leaves: usize,
    depth: usize,
}

pub fn train(cfg: &RunConfig) -> Result<()> {
    cfg.check_inputs(false)?;
    let data = Dataset::load(cfg)?;
    let (rows, gold) = data.labelled(data.range(Subset::Training, cfg.split)?)?;
    let tree = DecisionTree::train(rows, &gold, cfg.tree)?;
    if let Some(dir) = cfg.model.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    tree.save(&cfg.model)?;

    let summary = TrainingSummary {
        feature_order: feature_order_hash(),
        split: cfg.split,
        training: counts_of(&data.instances[..cfg.split]),
        test: counts_of(&data.instances[cfg.split..]),
        nodes: tree.nodes().len(),
        leaves: tree.leaf_count(),
        depth: tree.depth(),
    };
    write_output(&cfg.out, "training_summary.json", &json_bytes(&summary)?)?;
    eprintln!("{:<10}{:>10}{:>10}{:>10}{:>10}", "", "positive", "neutral", "negative", "total");
    for (name, c) in [("training", summary.training), ("test", summary.test)] {
        eprintln!(
            "{:<10}{:>10}{:>10}{:>10}{:>10}",
            name,
            c.positive,
            c.neutral,
            c.negative,
            c.total()
        );
    }
    eprintln!("model written to {} ({} leaves)", cfg.model.display(), summary.leaves);
    Ok(())
}

fn predict_range(tree: &DecisionTree<f64>, rows: &[Vector], cfg: &RunConfig) -> Vec<Polarity> {
    rows.iter()
        .map(|v| citerank::classifier::classify_vector(tree, v, &cfg.thresholds))
        .collect()
}

pub fn classify(cfg: &RunConfig) -> Result<()> {
    cfg.check_inputs(true)?;
    let tree = DecisionTree::<f64>::load(&cfg.model)?;
    let data = Dataset::load(cfg)?;
    let range = data.range(cfg.subset, cfg.split)?;
    let instances = &data.instances[range.clone()];
    let rows = &data.vectors[range];
    let predicted = predict_range(&tree, rows, cfg);

    let mut tsv = String::from("source_id\ttarget_id\tpredicted\tgold\n");
    for (inst, p) in instances.iter().zip(&predicted) {
        let gold = inst.gold.map(|g| g.symbol().to_string()).unwrap_or_default();
        tsv.push_str(&format!("{}\t{}\t{}\t{}\n", inst.source_id, inst.target_id, p.symbol(), gold));
    }
    write_output(&cfg.out, "predictions.tsv", tsv.as_bytes())?;

    let gold: Vec<Option<Polarity>> = instances.iter().map(|i| i.gold).collect();
    let mut csv = Vec::new();
    write_feature_matrix(&mut csv, rows, &gold)?;
    write_output(&cfg.out, "features.csv", &csv)?;
    eprintln!("classified {} instances: {}", predicted.len(), ClassCounts::from_labels(&predicted));
    Ok(())
}

pub fn evaluate(cfg: &RunConfig, baseline_only: bool, ablate: Option<AblationMode>) -> Result<()> {
    if let Some(mode) = ablate {
        cfg.check_inputs(false)?;
        let data = Dataset::load(cfg)?;
        let (train_rows, train_gold) = data.labelled(data.range(Subset::Training, cfg.split)?)?;
        let (test_rows, test_gold) = data.labelled(data.range(Subset::Test, cfg.split)?)?;
        let rows = ablation(
            (train_rows, &train_gold),
            (test_rows, &test_gold),
            &FeatureGroup::ALL,
            mode,
            cfg.tree,
            &cfg.thresholds,
        )?;
        let mut csv = Vec::new();
        write_ablation_csv(&mut csv, &rows, mode)?;
        let path = write_output(&cfg.out, &format!("ablation_{}.csv", mode.key()), &csv)?;
        eprintln!("wrote {}", path.display());
        return Ok(());
    }

    cfg.check_inputs(!baseline_only)?;
    let tree = if baseline_only {
        None
    } else {
        Some(DecisionTree::<f64>::load(&cfg.model)?)
    };
    let data = Dataset::load(cfg)?;
    let (test_rows, test_gold) = data.labelled(data.range(Subset::Test, cfg.split)?)?;
    let predicted = tree.map(|t| predict_range(&t, test_rows, cfg));
    let report = EvaluationReport::new(&test_gold, predicted.as_deref())?;
    write_output(&cfg.out, "evaluation.json", &json_bytes(&report)?)?;
    let text = report.to_text();
    write_output(&cfg.out, "evaluation.txt", text.as_bytes())?;
    eprint!("{text}");
    Ok(())
}

fn write_diff(out: &Path, report: &RankDiffReport) -> Result<()> {
    let mut csv = Vec::new();
    write_rank_diff_csv(&mut csv, report)?;
    write_output(out, "rank_diff.csv", &csv)?;
    write_output(out, "rank_diff_summary.json", &json_bytes(&report.summary)?)?;
    eprintln!(
        "{} rank changes, {} bucket changes, kendall tau {:.4}",
        report.summary.rank_changes, report.summary.bucket_changes, report.summary.kendall_tau
    );
    Ok(())
}

fn write_ranking(out: &Path, stem: &str, list: &RankedList<f64>) -> Result<()> {
    let mut csv = Vec::new();
    write_ranking_csv(&mut csv, list)?;
    write_output(out, &format!("{stem}.csv"), &csv)?;
    let mut json = Vec::new();
    write_ranking_json(&mut json, list)?;
    write_output(out, &format!("{stem}.json"), &json)?;
    Ok(())
}

pub fn rank(cfg: &RunConfig) -> Result<()> {
    let predicted = cfg.polarity == PolaritySource::Predicted;
    cfg.check_inputs(predicted)?;
    let Some(corpus) = &cfg.corpus else {
        bail!("--corpus is required");
    };
    let (instances, labels): (Vec<CitationInstance>, Vec<Polarity>) = if predicted {
        let tree = DecisionTree::<f64>::load(&cfg.model)?;
        let data = Dataset::load(cfg)?;
        let range = data.range(cfg.subset, cfg.split)?;
        let labels = predict_range(&tree, &data.vectors[range.clone()], cfg);
        (data.instances[range].to_vec(), labels)
    } else {
        let all = load_corpus(corpus, CorpusFormat::Tsv)?;
        let range = subset_range(all.len(), cfg.subset, cfg.split)?;
        let labels = gold_of(&all[range.clone()], range.start)?;
        let instances = all[range].to_vec();
        (instances, labels)
    };
    if instances.is_empty() {
        bail!("no citation instances");
    }
    let graph = build_graph(instances.iter().zip(labels));
    let naive = bucketize(&naive_rank::<f64>(&graph), cfg.buckets)?;
    let m = bucketize(&m_index::<f64>(&graph), cfg.buckets)?;
    write_ranking(&cfg.out, "naive_ranking", &naive)?;
    write_ranking(&cfg.out, "m_index_ranking", &m)?;
    let mut plot = Vec::new();
    write_plot_data(&mut plot, &naive, &m)?;
    write_output(&cfg.out, "plot_data.csv", &plot)?;
    eprintln!(
        "{} papers, {} edges ({} self-citations)",
        graph.nodes().len(),
        graph.edges().len(),
        graph.self_loops()
    );
    write_diff(&cfg.out, &compare_rankings(&naive, &m)?)
}

pub fn compare(cfg: &RunConfig, a: &Path, b: &Path) -> Result<()> {
    let read = |path: &Path, method| -> Result<RankedList<f64>> {
        let file = fs::File::open(path).map_err(|_| crate::config::MissingPath(path.to_path_buf()))?;
        Ok(read_ranking_csv(file, method)?)
    };
    let a = read(a, RankingMethod::Naive)?;
    let b = read(b, RankingMethod::MIndex)?;
    write_diff(&cfg.out, &compare_rankings(&a, &b)?)
}

pub fn grid(cfg: &RunConfig) -> Result<()> {
    cfg.check_inputs(true)?;
    let tree = DecisionTree::<f64>::load(&cfg.model)?;
    let data = Dataset::load(cfg)?;
    let (rows, gold) = data.labelled(data.range(Subset::Test, cfg.split)?)?;
    let predictions: Vec<Prediction> = rows.iter().map(|v| tree.predict(v)).collect();
    let matches: Vec<(usize, usize)> = rows
        .iter()
        .map(|v| {
            let (p, n) = v.match_counts();
            (p.max(0) as usize, n.max(0) as usize)
        })
        .collect();
    let report = grid_search(&predictions, &matches, &gold)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t1", "n1", "s1", "t2", "n2", "accuracy", "macro_f1"])?;
    for p in &report.points {
        let th = p.thresholds;
        w.write_record([
            th.t1.to_string(),
            th.n1.to_string(),
            format!("{:.1}", th.s1),
            th.t2.to_string(),
            th.n2.to_string(),
            format!("{:.4}", p.accuracy),
            format!("{:.4}", p.macro_f1),
        ])?;
    }
    let csv = w.into_inner().map_err(|e| anyhow::anyhow!("{}", e.error()))?;
    write_output(&cfg.out, "grid_search.csv", &csv)?;
    write_output(&cfg.out, "grid_search.json", &json_bytes(&report.best)?)?;

    let best = report.best.thresholds;
    let current: Vec<Polarity> = predictions
        .iter()
        .zip(&matches)
        .map(|(p, &(pos, neg))| postprocess(p, pos, neg, &cfg.thresholds))
        .collect();
    let current_accuracy =
        current.iter().zip(&gold).filter(|(p, g)| p == g).count() as f64 / gold.len().max(1) as f64;
    eprintln!(
        "best t1={} n1={} s1={:.1} t2={} n2={}: accuracy {:.4}, macro-F {:.4} (configured thresholds: {:.4})",
        best.t1, best.n1, best.s1, best.t2, best.n2, report.best.accuracy, report.best.macro_f1, current_accuracy
    );
    Ok(())
}
