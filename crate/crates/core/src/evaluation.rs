//! Confusion matrices, per-class metrics and feature-group ablation.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::classifier::{classify_vector, DecisionTree, Thresholds, TreeConfig};
use crate::corpus::Polarity;
use crate::error::{Error, Result};
use crate::features::{Feature, FeatureVector};
use crate::scalar::Scalar;

/// Rows are gold classes, columns predicted classes, both in
/// [`Polarity::ALL`] order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub cells: [[usize; 3]; 3],
}

impl ConfusionMatrix {
    pub fn from_cells(cells: [[usize; 3]; 3]) -> Self {
        ConfusionMatrix { cells }
    }

    pub fn get(&self, gold: Polarity, predicted: Polarity) -> usize {
        self.cells[gold.index()][predicted.index()]
    }

    pub fn total(&self) -> usize {
        self.cells.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..3).map(|i| self.cells[i][i]).sum()
    }

    pub fn row_sum(&self, gold: Polarity) -> usize {
        self.cells[gold.index()].iter().sum()
    }

    pub fn column_sum(&self, predicted: Polarity) -> usize {
        self.cells.iter().map(|row| row[predicted.index()]).sum()
    }
}

pub fn confusion(gold: &[Polarity], predicted: &[Polarity]) -> Result<ConfusionMatrix> {
    if gold.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            gold: gold.len(),
            predicted: predicted.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::Empty("label lists"));
    }
    let mut m = ConfusionMatrix::default();
    for (g, p) in gold.iter().zip(predicted) {
        m.cells[g.index()][p.index()] += 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerClass<T> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics<T> {
    /// Indexed in [`Polarity::ALL`] order.
    pub per_class: [PerClass<T>; 3],
    pub accuracy: T,
}

impl<T: Scalar> ClassMetrics<T> {
    pub fn class(&self, class: Polarity) -> &PerClass<T> {
        &self.per_class[class.index()]
    }

    pub fn macro_f1(&self) -> T {
        let sum = self.per_class.iter().fold(T::zero(), |acc, c| acc + c.f1);
        sum / T::from_count(3)
    }
}

fn ratio<T: Scalar>(num: usize, den: usize) -> T {
    if den == 0 {
        T::zero()
    } else {
        T::from_count(num) / T::from_count(den)
    }
}

/// Empty denominators give 0 rather than NaN.
pub fn metrics<T: Scalar>(m: &ConfusionMatrix) -> ClassMetrics<T> {
    let per_class = Polarity::ALL.map(|c| {
        let hit = m.get(c, c);
        let precision: T = ratio(hit, m.column_sum(c));
        let recall: T = ratio(hit, m.row_sum(c));
        let f1 = if precision + recall == T::zero() {
            T::zero()
        } else {
            T::two() * precision * recall / (precision + recall)
        };
        PerClass { precision, recall, f1 }
    });
    ClassMetrics {
        per_class,
        accuracy: ratio(m.trace(), m.total()),
    }
}

pub fn baseline_predictions(n: usize) -> Vec<Polarity> {
    vec![Polarity::Neutral; n]
}

/// Metrics of the predictor that labels everything Neutral.
pub fn baseline_all_neutral<T: Scalar>(gold: &[Polarity]) -> Result<ClassMetrics<T>> {
    Ok(metrics(&confusion(gold, &baseline_predictions(gold.len()))?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureGroup {
    Swn,
    CitationLexicons,
    PartOfSpeech,
    Dependency,
    OpinionLexicon1,
    OpinionLexicon2,
}

impl FeatureGroup {
    /// Table order, which add-one ablation accumulates in.
    pub const ALL: [FeatureGroup; 6] = [
        FeatureGroup::Swn,
        FeatureGroup::CitationLexicons,
        FeatureGroup::PartOfSpeech,
        FeatureGroup::Dependency,
        FeatureGroup::OpinionLexicon1,
        FeatureGroup::OpinionLexicon2,
    ];

    pub fn features(self) -> &'static [Feature] {
        use Feature::*;
        match self {
            FeatureGroup::Swn => &[AutomaticSentiment],
            FeatureGroup::CitationLexicons => &[PositiveWords, NegativeWords],
            FeatureGroup::PartOfSpeech => &[PosAdjective, PosAdverb, PosForeign, PosAdverbAdjective],
            FeatureGroup::Dependency => &[DepAdvmod, DepAcomp, DepAmod],
            FeatureGroup::OpinionLexicon1 => &[Ol1Positive, Ol1Negative],
            FeatureGroup::OpinionLexicon2 => &[Ol2Positive, Ol2Negative],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FeatureGroup::Swn => "SWN Lexicon",
            FeatureGroup::CitationLexicons => "Citation specific lexicons",
            FeatureGroup::PartOfSpeech => "Part of speech tags",
            FeatureGroup::Dependency => "Dependency tags",
            FeatureGroup::OpinionLexicon1 => "Opinion Lexicon 1",
            FeatureGroup::OpinionLexicon2 => "Opinion Lexicon 2",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            FeatureGroup::Swn => "swn",
            FeatureGroup::CitationLexicons => "citation",
            FeatureGroup::PartOfSpeech => "pos",
            FeatureGroup::Dependency => "dep",
            FeatureGroup::OpinionLexicon1 => "ol1",
            FeatureGroup::OpinionLexicon2 => "ol2",
        }
    }
}

impl FromStr for FeatureGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureGroup::ALL
            .into_iter()
            .find(|g| g.key().eq_ignore_ascii_case(s) || g.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownGroup(s.to_string()))
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn parse_groups<S: AsRef<str>>(names: &[S]) -> Result<Vec<FeatureGroup>> {
    names.iter().map(|n| n.as_ref().parse()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AblationMode {
    DropOne,
    AddOne,
}

impl AblationMode {
    pub fn key(self) -> &'static str {
        match self {
            AblationMode::DropOne => "drop-one",
            AblationMode::AddOne => "add-one",
        }
    }
}

impl FromStr for AblationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "drop-one" => Ok(AblationMode::DropOne),
            "add-one" => Ok(AblationMode::AddOne),
            other => Err(format!("unknown ablation mode '{other}' (expected drop-one or add-one)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub group: FeatureGroup,
    pub correct: usize,
    pub incorrect: usize,
    pub accuracy: f64,
}

/// Copies of `rows` with every column outside `active` zeroed.
pub fn mask_columns<T: Float>(rows: &[FeatureVector<T>], active: &[FeatureGroup]) -> Vec<FeatureVector<T>> {
    let inactive: Vec<Feature> = FeatureGroup::ALL
        .into_iter()
        .filter(|g| !active.contains(g))
        .flat_map(|g| g.features().iter().copied())
        .collect();
    rows.iter()
        .map(|v| {
            let mut v = *v;
            for &f in &inactive {
                v.set(f, T::zero());
            }
            v
        })
        .collect()
}

/// Retrains on the masked training set and counts correct test predictions
/// of the full pipeline (tree plus cascade).
pub fn evaluate_groups<T: Float>(
    training: (&[FeatureVector<T>], &[Polarity]),
    test: (&[FeatureVector<T>], &[Polarity]),
    active: &[FeatureGroup],
    config: TreeConfig,
    thresholds: &Thresholds,
) -> Result<(usize, usize)> {
    let train_rows = mask_columns(training.0, active);
    let test_rows = mask_columns(test.0, active);
    let tree = DecisionTree::train(&train_rows, training.1, config)?;
    if test_rows.len() != test.1.len() {
        return Err(Error::LengthMismatch {
            gold: test.1.len(),
            predicted: test_rows.len(),
        });
    }
    let correct = test_rows
        .iter()
        .zip(test.1)
        .filter(|(v, &g)| classify_vector(&tree, v, thresholds) == g)
        .count();
    Ok((correct, test_rows.len() - correct))
}

/// One retrain-and-evaluate per group. Drop-one zeroes just that group's
/// columns; add-one keeps the groups up to and including the row's group.
pub fn ablation<T: Float>(
    training: (&[FeatureVector<T>], &[Polarity]),
    test: (&[FeatureVector<T>], &[Polarity]),
    groups: &[FeatureGroup],
    mode: AblationMode,
    config: TreeConfig,
    thresholds: &Thresholds,
) -> Result<Vec<AblationRow>> {
    groups
        .iter()
        .enumerate()
        .map(|(i, &group)| {
            let active: Vec<FeatureGroup> = match mode {
                AblationMode::DropOne => FeatureGroup::ALL.into_iter().filter(|&g| g != group).collect(),
                AblationMode::AddOne => groups[..=i].to_vec(),
            };
            let (correct, incorrect) = evaluate_groups(training, test, &active, config, thresholds)?;
            Ok(AblationRow {
                group,
                correct,
                incorrect,
                accuracy: ratio(correct, correct + incorrect),
            })
        })
        .collect()
}

pub fn write_ablation_csv<W: Write>(out: W, rows: &[AblationRow], mode: AblationMode) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let first = match mode {
        AblationMode::DropOne => "Feature eliminated",
        AblationMode::AddOne => "Feature added",
    };
    writer.write_record([
        first,
        "Number of correct classifications",
        "Number of incorrect classifications",
        "Accuracy",
    ])?;
    for row in rows {
        writer.write_record([
            row.group.label().to_string(),
            row.correct.to_string(),
            row.incorrect.to_string(),
            format!("{:.4}", row.accuracy),
        ])?;
    }
    writer.flush().map_err(|e| Error::io("<ablation csv>", e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerClassScores {
    pub positive: ClassScores,
    pub neutral: ClassScores,
    pub negative: ClassScores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub per_class: PerClassScores,
    pub accuracy: f64,
}

impl<T: Scalar> From<&ClassMetrics<T>> for MetricsReport {
    fn from(m: &ClassMetrics<T>) -> Self {
        let scores = |c: Polarity| {
            let pc = m.class(c);
            ClassScores {
                precision: pc.precision.to_f64_lossy(),
                recall: pc.recall.to_f64_lossy(),
                f1: pc.f1.to_f64_lossy(),
            }
        };
        MetricsReport {
            per_class: PerClassScores {
                positive: scores(Polarity::Positive),
                neutral: scores(Polarity::Neutral),
                negative: scores(Polarity::Negative),
            },
            accuracy: m.accuracy.to_f64_lossy(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confusion: Option<ConfusionMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_class: Option<PerClassScores>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    pub baseline: MetricsReport,
}

impl EvaluationReport {
    pub fn new(gold: &[Polarity], predicted: Option<&[Polarity]>) -> Result<Self> {
        let baseline = MetricsReport::from(&baseline_all_neutral::<f64>(gold)?);
        let Some(predicted) = predicted else {
            return Ok(EvaluationReport {
                confusion: None,
                per_class: None,
                accuracy: None,
                baseline,
            });
        };
        let m = confusion(gold, predicted)?;
        let report = MetricsReport::from(&metrics::<f64>(&m));
        Ok(EvaluationReport {
            confusion: Some(m),
            per_class: Some(report.per_class),
            accuracy: Some(report.accuracy),
            baseline,
        })
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(m) = &self.confusion {
            s.push_str("Confusion matrix (rows gold, columns predicted)\n");
            s.push_str(&format!("{:<10}{:>10}{:>10}{:>10}\n", "", "positive", "neutral", "negative"));
            for g in Polarity::ALL {
                s.push_str(&format!("{:<10}", g.name()));
                for p in Polarity::ALL {
                    s.push_str(&format!("{:>10}", m.get(g, p)));
                }
                s.push('\n');
            }
            s.push('\n');
        }
        let mut table = |title: &str, per: &PerClassScores, accuracy: f64| {
            s.push_str(&format!("{title}\n{:<10}{:>10}{:>10}{:>10}\n", "", "precision", "recall", "f1"));
            for (name, c) in [("positive", &per.positive), ("neutral", &per.neutral), ("negative", &per.negative)] {
                s.push_str(&format!("{name:<10}{:>10.3}{:>10.3}{:>10.3}\n", c.precision, c.recall, c.f1));
            }
            s.push_str(&format!("accuracy {accuracy:.4}\n\n"));
        };
        if let (Some(per), Some(acc)) = (&self.per_class, self.accuracy) {
            table("Classifier", per, acc);
        }
        table("Baseline (all neutral)", &self.baseline.per_class, self.baseline.accuracy);
        s
    }
}
