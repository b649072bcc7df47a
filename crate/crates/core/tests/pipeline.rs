use citerank::classifier::{classify_pipeline, DecisionTree, Thresholds, TreeConfig};
use citerank::corpus::{gold_labels, load_corpus, split_corpus, CorpusFormat, Polarity};
use citerank::evaluation::{ablation, baseline_all_neutral, evaluate_groups, AblationMode, FeatureGroup};
use citerank::features::{extract_all, Feature, FeatureVector};
use citerank::lexicons::LexiconBundle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn data(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Only DEP_amod carries the label; every other column is noise. PPW and
/// NPW stay in {0, 1} so the cascade's count rules never fire.
fn amod_dataset(seed: u64, n: usize) -> (Vec<FeatureVector<f64>>, Vec<Polarity>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let positive = i % 2 == 0;
        let mut v = FeatureVector::zeros();
        for (c, x) in v.values_mut().iter_mut().enumerate() {
            *x = match c {
                1 | 2 => rng.gen_range(0..2) as f64,
                _ => rng.gen_range(0..4) as f64,
            };
        }
        v.set(Feature::DepAmod, if positive { rng.gen_range(1..4) as f64 } else { 0.0 });
        rows.push(v);
        labels.push(if positive { Polarity::Positive } else { Polarity::Neutral });
    }
    (rows, labels)
}

#[test]
fn drop_one_isolates_the_informative_group() {
    let (train_x, train_y) = amod_dataset(1, 200);
    let (test_x, test_y) = amod_dataset(2, 100);
    let rows = ablation(
        (&train_x, &train_y),
        (&test_x, &test_y),
        &FeatureGroup::ALL,
        AblationMode::DropOne,
        TreeConfig::default(),
        &Thresholds::default(),
    )
    .unwrap();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        assert_eq!(row.correct + row.incorrect, 100);
        if row.group == FeatureGroup::Dependency {
            assert!(row.accuracy < 1.0, "{row:?}");
        } else {
            assert_eq!(row.accuracy, 1.0, "{row:?}");
        }
    }
}

#[test]
fn add_one_accumulates_in_table_order() {
    let (train_x, train_y) = amod_dataset(3, 200);
    let (test_x, test_y) = amod_dataset(4, 100);
    let rows = ablation(
        (&train_x, &train_y),
        (&test_x, &test_y),
        &FeatureGroup::ALL,
        AblationMode::AddOne,
        TreeConfig::default(),
        &Thresholds::default(),
    )
    .unwrap();
    let acc: Vec<f64> = rows.iter().map(|r| r.accuracy).collect();
    // dependency tags enter at row 4 and stay in
    assert!(acc[..3].iter().all(|&a| a < 1.0));
    assert!(acc[3..].iter().all(|&a| a == 1.0));
}

#[test]
fn no_groups_reduces_to_baseline() {
    let (train_x, train_y) = amod_dataset(5, 200);
    let (test_x, mut test_y) = amod_dataset(6, 100);
    // skew the test gold so the baseline is not 50%
    for y in test_y.iter_mut().take(30) {
        *y = Polarity::Neutral;
    }
    let (correct, incorrect) =
        evaluate_groups((&train_x, &train_y), (&test_x, &test_y), &[], TreeConfig::default(), &Thresholds::default()).unwrap();
    let baseline = baseline_all_neutral::<f64>(&test_y).unwrap().accuracy;
    assert_eq!(correct as f64 / (correct + incorrect) as f64, baseline);
}

#[test]
fn golden_corpus_regression() {
    let corpus = load_corpus(data("golden_corpus.tsv"), CorpusFormat::Tsv).unwrap();
    let lexicons = LexiconBundle::default();
    let split = split_corpus(corpus.clone(), 8).unwrap();
    let x = extract_all::<f64>(&split.training, None, &lexicons).unwrap();
    let y = gold_labels(&split.training).unwrap();
    let tree = DecisionTree::train(&x, &y, TreeConfig::default()).unwrap();
    let th = Thresholds::default();
    let predicted: String = corpus
        .iter()
        .map(|inst| classify_pipeline(inst, None, &lexicons, &tree, &th).symbol())
        .collect();
    let expected = std::fs::read_to_string(data("golden_labels.txt")).unwrap();
    assert_eq!(predicted, expected.trim(), "tree:\n{}", tree.to_model_string());
}
