//! Gain-ratio decision tree and the lexicon-count post-processing cascade.
//!
//! Splits are binary tests `feature <= threshold`, with candidate thresholds
//! at midpoints between consecutive distinct values. Among candidates that
//! leave at least `min_leaf` instances on each side and have positive
//! information gain, the one with the highest gain ratio wins; ties go to
//! the lower feature index, then the lower threshold. Grown trees are pruned
//! bottom-up by replacing a subtree with a leaf whenever the pessimistic
//! (upper confidence bound) error of the leaf does not exceed that of the
//! subtree.

use std::fmt::{self, Display};
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_traits::Float;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::corpus::{CitationInstance, ClassCounts, Polarity};
use crate::error::{Error, Result};
use crate::evaluation::{confusion, metrics};
use crate::features::{extract, feature_order_hash, FeatureVector, SyntacticAnnotation, FEATURE_COUNT};
use crate::lexicons::LexiconBundle;

pub const MODEL_HEADER: &str = "citerank-tree v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    /// Minimum number of training instances on each side of a split.
    pub min_leaf: usize,
    /// Confidence factor for pessimistic pruning; `None` disables pruning.
    pub pruning_confidence: Option<f64>,
    pub max_depth: Option<usize>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            min_leaf: 2,
            pruning_confidence: Some(0.25),
            max_depth: None,
        }
    }
}

impl TreeConfig {
    pub fn unpruned() -> Self {
        TreeConfig {
            pruning_confidence: None,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node<T> {
    Leaf {
        counts: ClassCounts,
    },
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
        counts: ClassCounts,
    },
}

impl<T> Node<T> {
    pub fn counts(&self) -> ClassCounts {
        match self {
            Node::Leaf { counts } | Node::Split { counts, .. } => *counts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub klass: Polarity,
    pub confidence: f64,
}

impl Prediction {
    /// Majority class of `counts`; ties prefer Neutral, then Positive.
    pub fn from_counts(counts: &ClassCounts) -> Self {
        let klass = [Polarity::Neutral, Polarity::Positive, Polarity::Negative]
            .into_iter()
            .fold(Polarity::Neutral, |best, c| {
                if counts.get(c) > counts.get(best) {
                    c
                } else {
                    best
                }
            });
        let total = counts.total();
        let confidence = if total == 0 {
            0.0
        } else {
            counts.get(klass) as f64 / total as f64
        };
        Prediction { klass, confidence }
    }
}

/// Gain ratio of the chosen split and of every candidate considered at one
/// node during training.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitAudit {
    pub chosen: f64,
    pub candidates: Vec<f64>,
}

/// Preorder node list; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree<T> {
    nodes: Vec<Node<T>>,
}

enum Grown<T> {
    Leaf(ClassCounts),
    Split {
        feature: usize,
        threshold: T,
        counts: ClassCounts,
        left: Box<Grown<T>>,
        right: Box<Grown<T>>,
    },
}

fn entropy(counts: &[usize; 3], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn as_array(c: &ClassCounts) -> [usize; 3] {
    [c.positive, c.neutral, c.negative]
}

const MIN_GAIN: f64 = 1e-12;

struct Builder<'a, T> {
    rows: &'a [FeatureVector<T>],
    labels: &'a [Polarity],
    config: TreeConfig,
    audit: Option<Vec<SplitAudit>>,
}

struct Candidate<T> {
    feature: usize,
    threshold: T,
    ratio: f64,
}

impl<T: Float> Builder<'_, T> {
    fn counts_of(&self, idx: &[usize]) -> ClassCounts {
        ClassCounts::from_labels(idx.iter().map(|&i| &self.labels[i]))
    }

    fn best_split(&mut self, idx: &mut [usize], parent: &ClassCounts) -> Option<Candidate<T>> {
        let n = idx.len();
        let parent_entropy = entropy(&as_array(parent), n);
        let mut best: Option<Candidate<T>> = None;
        let mut considered = Vec::new();
        for feature in 0..FEATURE_COUNT {
            idx.sort_by(|&a, &b| {
                self.rows[a].values()[feature]
                    .partial_cmp(&self.rows[b].values()[feature])
                    .expect("finite feature values")
                    .then(a.cmp(&b))
            });
            let mut left = [0usize; 3];
            let mut right = as_array(parent);
            for pos in 0..n - 1 {
                let class = self.labels[idx[pos]].index();
                left[class] += 1;
                right[class] -= 1;
                let here = self.rows[idx[pos]].values()[feature];
                let next = self.rows[idx[pos + 1]].values()[feature];
                if here == next {
                    continue;
                }
                let (nl, nr) = (pos + 1, n - pos - 1);
                if nl < self.config.min_leaf || nr < self.config.min_leaf {
                    continue;
                }
                let (pl, pr) = (nl as f64 / n as f64, nr as f64 / n as f64);
                let gain = parent_entropy - pl * entropy(&left, nl) - pr * entropy(&right, nr);
                if gain <= MIN_GAIN {
                    continue;
                }
                let split_info = -pl * pl.log2() - pr * pr.log2();
                let ratio = gain / split_info;
                considered.push(ratio);
                if best.as_ref().is_none_or(|b| ratio > b.ratio) {
                    let two = T::one() + T::one();
                    best = Some(Candidate {
                        feature,
                        threshold: here + (next - here) / two,
                        ratio,
                    });
                }
            }
        }
        if let (Some(audit), Some(b)) = (self.audit.as_mut(), best.as_ref()) {
            audit.push(SplitAudit {
                chosen: b.ratio,
                candidates: considered,
            });
        }
        best
    }

    fn grow(&mut self, idx: &mut [usize], depth: usize) -> Grown<T> {
        let counts = self.counts_of(idx);
        let pure = as_array(&counts).iter().filter(|&&c| c > 0).count() <= 1;
        let too_small = idx.len() < 2 * self.config.min_leaf.max(1);
        let too_deep = self.config.max_depth.is_some_and(|d| depth >= d);
        if pure || too_small || too_deep {
            return Grown::Leaf(counts);
        }
        let Some(split) = self.best_split(idx, &counts) else {
            return Grown::Leaf(counts);
        };
        let (mut left, mut right): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.rows[i].values()[split.feature] <= split.threshold);
        let left = self.grow(&mut left, depth + 1);
        let right = self.grow(&mut right, depth + 1);
        Grown::Split {
            feature: split.feature,
            threshold: split.threshold,
            counts,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

/// Upper-bound extra errors for a leaf covering `n` instances with `e`
/// training errors at confidence `cf`.
fn added_errors(n: f64, e: f64, cf: f64) -> f64 {
    if e < 1.0 {
        let base = n * (1.0 - cf.powf(1.0 / n));
        if e == 0.0 {
            return base;
        }
        return base + e * (added_errors(n, 1.0, cf) - base);
    }
    if e + 0.5 >= n {
        return (n - e).max(0.0);
    }
    let z = Normal::standard().inverse_cdf(1.0 - cf);
    let f = (e + 0.5) / n;
    let r = (f + z * z / (2.0 * n) + z * (f / n - f * f / n + z * z / (4.0 * n * n)).sqrt()) / (1.0 + z * z / n);
    r * n - e
}

fn leaf_error_estimate(counts: &ClassCounts, cf: f64) -> f64 {
    let n = counts.total() as f64;
    let majority = Prediction::from_counts(counts).klass;
    let errors = n - counts.get(majority) as f64;
    errors + added_errors(n, errors, cf)
}

fn prune<T>(node: Grown<T>, cf: f64) -> (Grown<T>, f64) {
    match node {
        Grown::Leaf(counts) => {
            let est = leaf_error_estimate(&counts, cf);
            (Grown::Leaf(counts), est)
        }
        Grown::Split {
            feature,
            threshold,
            counts,
            left,
            right,
        } => {
            let (left, le) = prune(*left, cf);
            let (right, re) = prune(*right, cf);
            let subtree = le + re;
            let as_leaf = leaf_error_estimate(&counts, cf);
            if as_leaf <= subtree + 0.1 {
                (Grown::Leaf(counts), as_leaf)
            } else {
                let node = Grown::Split {
                    feature,
                    threshold,
                    counts,
                    left: Box::new(left),
                    right: Box::new(right),
                };
                (node, subtree)
            }
        }
    }
}

fn flatten<T>(node: Grown<T>, out: &mut Vec<Node<T>>) -> usize {
    let at = out.len();
    match node {
        Grown::Leaf(counts) => out.push(Node::Leaf { counts }),
        Grown::Split {
            feature,
            threshold,
            counts,
            left,
            right,
        } => {
            out.push(Node::Leaf { counts });
            let l = flatten(*left, out);
            let r = flatten(*right, out);
            out[at] = Node::Split {
                feature,
                threshold,
                left: l,
                right: r,
                counts,
            };
        }
    }
    at
}

impl<T: Float> DecisionTree<T> {
    pub fn train(rows: &[FeatureVector<T>], labels: &[Polarity], config: TreeConfig) -> Result<Self> {
        Self::train_inner(rows, labels, config, None).map(|(tree, _)| tree)
    }

    /// Trains and also records the gain ratios seen at every split.
    pub fn train_with_audit(
        rows: &[FeatureVector<T>],
        labels: &[Polarity],
        config: TreeConfig,
    ) -> Result<(Self, Vec<SplitAudit>)> {
        Self::train_inner(rows, labels, config, Some(Vec::new())).map(|(tree, a)| (tree, a.unwrap_or_default()))
    }

    fn train_inner(
        rows: &[FeatureVector<T>],
        labels: &[Polarity],
        config: TreeConfig,
        audit: Option<Vec<SplitAudit>>,
    ) -> Result<(Self, Option<Vec<SplitAudit>>)> {
        if rows.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                gold: labels.len(),
                predicted: rows.len(),
            });
        }
        if let Some(cf) = config.pruning_confidence {
            if !(cf > 0.0 && cf <= 0.5) {
                return Err(Error::Thresholds(format!("pruning confidence {cf} outside (0, 0.5]")));
            }
        }
        if rows.iter().any(|r| r.values().iter().any(|v| !v.is_finite())) {
            return Err(Error::Model("non-finite feature value in training data".into()));
        }
        let mut builder = Builder {
            rows,
            labels,
            config,
            audit,
        };
        let mut idx: Vec<usize> = (0..rows.len()).collect();
        let mut grown = builder.grow(&mut idx, 0);
        if let Some(cf) = config.pruning_confidence {
            grown = prune(grown, cf).0;
        }
        let mut nodes = Vec::new();
        flatten(grown, &mut nodes);
        Ok((DecisionTree { nodes }, builder.audit))
    }

    fn leaf_for(&self, v: &FeatureVector<T>) -> &ClassCounts {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    at = if v.values()[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn predict(&self, v: &FeatureVector<T>) -> Prediction {
        Prediction::from_counts(self.leaf_for(v))
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    /// `(feature, threshold)` of the root test, if the root is not a leaf.
    pub fn root_split(&self) -> Option<(usize, T)> {
        match self.nodes[0] {
            Node::Split { feature, threshold, .. } => Some((feature, threshold)),
            Node::Leaf { .. } => None,
        }
    }

    pub fn depth(&self) -> usize {
        fn walk<T>(nodes: &[Node<T>], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

impl<T: Float + Display> DecisionTree<T> {
    pub fn write_model<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{MODEL_HEADER}")?;
        writeln!(out, "features {}", feature_order_hash())?;
        writeln!(out, "nodes {}", self.nodes.len())?;
        for node in &self.nodes {
            match node {
                Node::Leaf { counts } => {
                    writeln!(out, "leaf {} {} {}", counts.positive, counts.neutral, counts.negative)?
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    counts,
                } => writeln!(
                    out,
                    "split {feature} {threshold} {left} {right} {} {} {}",
                    counts.positive, counts.neutral, counts.negative
                )?,
            }
        }
        Ok(())
    }

    pub fn to_model_string(&self) -> String {
        let mut out = Vec::new();
        self.write_model(&mut out).expect("writing to memory");
        String::from_utf8(out).expect("ascii model")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_model_string()).map_err(|e| Error::io(path, e))
    }
}

impl<T: Float + FromStr> DecisionTree<T> {
    pub fn from_model_str(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Model(m);
        let mut lines = text.lines();
        if lines.next() != Some(MODEL_HEADER) {
            return Err(bad(format!("missing '{MODEL_HEADER}' header")));
        }
        let hash = lines
            .next()
            .and_then(|l| l.strip_prefix("features "))
            .ok_or_else(|| bad("missing feature-order line".into()))?;
        if hash != feature_order_hash() {
            return Err(Error::FeatureOrderMismatch {
                model: hash.to_string(),
                expected: feature_order_hash(),
            });
        }
        let count: usize = lines
            .next()
            .and_then(|l| l.strip_prefix("nodes "))
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| bad("missing node count".into()))?;
        let mut nodes = Vec::with_capacity(count);
        for (i, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(' ').collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("node {i}: bad integer '{s}'")));
            let counts = |s: &[&str]| -> Result<ClassCounts> { Ok(ClassCounts::new(num(s[0])?, num(s[1])?, num(s[2])?)) };
            let node = match (f[0], f.len()) {
                ("leaf", 4) => Node::Leaf { counts: counts(&f[1..4])? },
                ("split", 8) => {
                    let feature = num(f[1])?;
                    let threshold = f[2]
                        .parse::<T>()
                        .map_err(|_| bad(format!("node {i}: bad threshold '{}'", f[2])))?;
                    let (left, right) = (num(f[3])?, num(f[4])?);
                    if feature >= FEATURE_COUNT || left <= i || right <= i || left >= count || right >= count {
                        return Err(bad(format!("node {i}: invalid split")));
                    }
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                        counts: counts(&f[5..8])?,
                    }
                }
                _ => return Err(bad(format!("node {i}: unrecognized line '{line}'"))),
            };
            if node.counts().total() == 0 {
                return Err(bad(format!("node {i}: empty class counts")));
            }
            nodes.push(node);
        }
        if nodes.len() != count || count == 0 {
            return Err(bad(format!("expected {count} nodes, found {}", nodes.len())));
        }
        Ok(DecisionTree { nodes })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_model_str(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

/// Post-processing thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub t1: i64,
    pub n1: i64,
    pub s1: f64,
    pub t2: i64,
    pub n2: i64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            t1: 3,
            n1: 2,
            s1: 0.8,
            t2: 2,
            n2: 1,
        }
    }
}

impl Thresholds {
    pub fn new(t1: i64, n1: i64, s1: f64, t2: i64, n2: i64) -> Result<Self> {
        let th = Thresholds { t1, n1, s1, t2, n2 };
        th.validate()?;
        Ok(th)
    }

    /// Count rules can never fire and any confidence passes, so the tree's
    /// own prediction always comes through.
    pub fn disabled() -> Self {
        Thresholds {
            t1: i64::MAX,
            n1: i64::MAX,
            s1: 0.0,
            t2: i64::MAX,
            n2: i64::MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.s1) {
            return Err(Error::Thresholds(format!("s1 = {} outside [0, 1]", self.s1)));
        }
        if !(self.t1 >= self.t2 && self.t2 >= 0) {
            return Err(Error::Thresholds(format!("need t1 >= t2 >= 0, got t1={} t2={}", self.t1, self.t2)));
        }
        if !(self.n1 >= self.n2 && self.n2 >= 0) {
            return Err(Error::Thresholds(format!("need n1 >= n2 >= 0, got n1={} n2={}", self.n1, self.n2)));
        }
        Ok(())
    }
}

impl fmt::Display for Thresholds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t1={} n1={} s1={} t2={} n2={}", self.t1, self.n1, self.s1, self.t2, self.n2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CascadeRule {
    StrongPositive,
    StrongNegative,
    ConfidentTree,
    WeakPositive,
    WeakNegative,
    Fallback,
}

/// Applies the cascade and reports which rule decided.
pub fn cascade(pred: &Prediction, posmatch: usize, negmatch: usize, th: &Thresholds) -> (Polarity, CascadeRule) {
    let diff = posmatch as i64 - negmatch as i64;
    let neg = negmatch as i64;
    if diff > th.t1 {
        (Polarity::Positive, CascadeRule::StrongPositive)
    } else if neg > th.n1 {
        (Polarity::Negative, CascadeRule::StrongNegative)
    } else if pred.confidence > th.s1 {
        (pred.klass, CascadeRule::ConfidentTree)
    } else if diff > th.t2 {
        (Polarity::Positive, CascadeRule::WeakPositive)
    } else if neg > th.n2 {
        (Polarity::Negative, CascadeRule::WeakNegative)
    } else {
        (Polarity::Neutral, CascadeRule::Fallback)
    }
}

pub fn postprocess(pred: &Prediction, posmatch: usize, negmatch: usize, th: &Thresholds) -> Polarity {
    cascade(pred, posmatch, negmatch, th).0
}

/// Tree prediction followed by the cascade, reading the match counts from
/// the vector's PPW/NPW columns.
pub fn classify_vector<T: Float>(tree: &DecisionTree<T>, v: &FeatureVector<T>, th: &Thresholds) -> Polarity {
    let (pos, neg) = v.match_counts();
    postprocess(&tree.predict(v), pos.max(0) as usize, neg.max(0) as usize, th)
}

pub fn classify_pipeline<T: Float>(
    instance: &CitationInstance,
    annotation: Option<&SyntacticAnnotation>,
    lexicons: &LexiconBundle,
    tree: &DecisionTree<T>,
    th: &Thresholds,
) -> Polarity {
    classify_vector(tree, &extract::<T>(instance, annotation, lexicons), th)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub thresholds: Thresholds,
    pub accuracy: f64,
    pub macro_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchReport {
    pub best: GridPoint,
    pub points: Vec<GridPoint>,
}

/// Sweeps t1, n1 over 1..=5, s1 over 0.5..=1.0 in steps of 0.1, t2 over
/// 1..=t1 and n2 over 1..=n1. The best point maximizes accuracy; the first
/// one in sweep order wins ties.
pub fn grid_search(
    predictions: &[Prediction],
    matches: &[(usize, usize)],
    gold: &[Polarity],
) -> Result<GridSearchReport> {
    if predictions.len() != gold.len() || matches.len() != gold.len() {
        return Err(Error::LengthMismatch {
            gold: gold.len(),
            predicted: predictions.len(),
        });
    }
    let mut points = Vec::new();
    for t1 in 1..=5 {
        for n1 in 1..=5 {
            for s_step in 5..=10 {
                let s1 = s_step as f64 / 10.0;
                for t2 in 1..=t1 {
                    for n2 in 1..=n1 {
                        let th = Thresholds { t1, n1, s1, t2, n2 };
                        let predicted: Vec<Polarity> = predictions
                            .iter()
                            .zip(matches)
                            .map(|(p, &(pos, neg))| postprocess(p, pos, neg, &th))
                            .collect();
                        let m = metrics::<f64>(&confusion(gold, &predicted)?);
                        points.push(GridPoint {
                            thresholds: th,
                            accuracy: m.accuracy,
                            macro_f1: m.macro_f1(),
                        });
                    }
                }
            }
        }
    }
    let best = points
        .iter()
        .fold(None::<&GridPoint>, |best, p| match best {
            Some(b) if b.accuracy >= p.accuracy => Some(b),
            _ => Some(p),
        })
        .cloned()
        .ok_or(Error::Empty("grid"))?;
    Ok(GridSearchReport { best, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Feature;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pred(klass: Polarity, confidence: f64) -> Prediction {
        Prediction { klass, confidence }
    }

    fn vector(values: &[f64]) -> FeatureVector<f64> {
        let mut v = FeatureVector::zeros();
        v.values_mut()[..values.len()].copy_from_slice(values);
        v
    }

    fn random_dataset(seed: u64, n: usize) -> (Vec<FeatureVector<f64>>, Vec<Polarity>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..n)
            .map(|_| {
                let mut v = FeatureVector::zeros();
                for x in v.values_mut() {
                    *x = rng.gen_range(0..5) as f64;
                }
                v
            })
            .collect();
        let labels = (0..n).map(|_| Polarity::ALL[rng.gen_range(0..3)]).collect();
        (rows, labels)
    }

    #[test]
    fn leaf_majority_and_confidence() {
        assert_eq!(Prediction::from_counts(&ClassCounts::new(0, 10, 0)), pred(Polarity::Neutral, 1.0));
        assert_eq!(Prediction::from_counts(&ClassCounts::new(3, 3, 0)), pred(Polarity::Neutral, 0.5));
        assert_eq!(Prediction::from_counts(&ClassCounts::new(2, 0, 2)), pred(Polarity::Positive, 0.5));
        assert_eq!(Prediction::from_counts(&ClassCounts::new(1, 0, 3)), pred(Polarity::Negative, 0.75));
    }

    #[test]
    fn cascade_traces() {
        let th = Thresholds::default();
        let p = pred(Polarity::Negative, 0.99);
        assert_eq!(cascade(&p, 5, 1, &th), (Polarity::Positive, CascadeRule::StrongPositive));
        assert_eq!(cascade(&pred(Polarity::Neutral, 0.5), 0, 3, &th), (Polarity::Negative, CascadeRule::StrongNegative));
        assert_eq!(cascade(&pred(Polarity::Neutral, 0.9), 0, 0, &th), (Polarity::Neutral, CascadeRule::ConfidentTree));
        assert_eq!(cascade(&pred(Polarity::Neutral, 0.6), 3, 0, &th), (Polarity::Positive, CascadeRule::WeakPositive));
        assert_eq!(cascade(&pred(Polarity::Neutral, 0.6), 0, 2, &th), (Polarity::Negative, CascadeRule::WeakNegative));
        assert_eq!(cascade(&pred(Polarity::Positive, 0.6), 1, 1, &th), (Polarity::Neutral, CascadeRule::Fallback));
        // confidence exactly at s1 does not pass
        assert_eq!(cascade(&pred(Polarity::Positive, 0.8), 0, 0, &th).1, CascadeRule::Fallback);
    }

    #[test]
    fn threshold_validation() {
        assert!(Thresholds::default().validate().is_ok());
        assert!(Thresholds::new(2, 2, 0.8, 3, 1).is_err());
        assert!(Thresholds::new(3, 1, 0.8, 2, 2).is_err());
        assert!(Thresholds::new(3, 2, 1.5, 2, 1).is_err());
        assert!(Thresholds::new(3, 2, 0.8, -1, 1).is_err());
        assert!(Thresholds::disabled().validate().is_ok());
    }

    #[test]
    fn single_class_is_single_leaf() {
        let rows = vec![vector(&[1.0]), vector(&[2.0]), vector(&[3.0])];
        let tree = DecisionTree::train(&rows, &[Polarity::Negative; 3], TreeConfig::default()).unwrap();
        assert_eq!(tree.nodes().len(), 1);
        assert_eq!(tree.predict(&vector(&[9.0])), pred(Polarity::Negative, 1.0));
    }

    #[test]
    fn empty_training_set_errors() {
        assert!(matches!(
            DecisionTree::<f64>::train(&[], &[], TreeConfig::default()),
            Err(Error::EmptyTrainingSet)
        ));
    }

    #[test]
    fn separable_feature_becomes_root() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let x = i as f64;
            rows.push(vector(&[x, (i % 3) as f64, (i % 2) as f64]));
            labels.push(if x > 5.0 { Polarity::Positive } else { Polarity::Neutral });
        }
        let tree = DecisionTree::train(&rows, &labels, TreeConfig::unpruned()).unwrap();
        let (feature, threshold) = tree.root_split().unwrap();
        assert_eq!(feature, 0);
        assert_eq!(threshold, 5.5);
        for (r, l) in rows.iter().zip(&labels) {
            assert_eq!(tree.predict(r).klass, *l);
        }
    }

    #[test]
    fn training_is_deterministic() {
        let (rows, labels) = random_dataset(7, 20);
        let a = DecisionTree::train(&rows, &labels, TreeConfig::default()).unwrap().to_model_string();
        for _ in 0..3 {
            assert_eq!(DecisionTree::train(&rows, &labels, TreeConfig::default()).unwrap().to_model_string(), a);
        }
    }

    #[test]
    fn model_round_trip() {
        let (rows, labels) = random_dataset(11, 200);
        let tree = DecisionTree::train(&rows, &labels, TreeConfig::unpruned()).unwrap();
        let text = tree.to_model_string();
        assert!(text.starts_with("citerank-tree v1\nfeatures "));
        let back = DecisionTree::<f64>::from_model_str(&text).unwrap();
        assert_eq!(back, tree);
        let f32_tree = DecisionTree::<f32>::from_model_str(&text).unwrap();
        assert_eq!(f32_tree.leaf_count(), tree.leaf_count());
    }

    #[test]
    fn model_hash_mismatch_is_rejected() {
        let text = "citerank-tree v1\nfeatures 0000000000000000\nnodes 1\nleaf 0 1 0\n";
        assert!(matches!(
            DecisionTree::<f64>::from_model_str(text),
            Err(Error::FeatureOrderMismatch { .. })
        ));
        let good = format!("citerank-tree v1\nfeatures {}\nnodes 1\nleaf 0 1 0\n", feature_order_hash());
        assert!(DecisionTree::<f64>::from_model_str(&good).is_ok());
        let cyclic = format!("citerank-tree v1\nfeatures {}\nnodes 2\nsplit 0 1 0 1 1 1 0\nleaf 0 1 0\n", feature_order_hash());
        assert!(DecisionTree::<f64>::from_model_str(&cyclic).is_err());
    }

    #[test]
    fn pessimistic_error_matches_reference_values() {
        // N=6, e=0 at CF=0.25: 6 * (1 - 0.25^(1/6))
        assert!((added_errors(6.0, 0.0, 0.25) - 1.2378).abs() < 1e-4);
        // normal-approximation branch, z = 0.6745 for CF = 0.25
        let v = added_errors(14.0, 5.0, 0.25);
        let z: f64 = 0.674489750196;
        let f = 5.5 / 14.0;
        let r = (f + z * z / 28.0 + z * (f / 14.0 - f * f / 14.0 + z * z / (4.0 * 196.0)).sqrt()) / (1.0 + z * z / 14.0);
        assert!((v - (r * 14.0 - 5.0)).abs() < 1e-9);
        assert_eq!(added_errors(3.0, 3.0, 0.25), 0.0);
    }

    #[test]
    fn pruning_collapses_noise_splits() {
        let (rows, labels) = random_dataset(3, 300);
        let full = DecisionTree::train(&rows, &labels, TreeConfig::unpruned()).unwrap();
        let pruned = DecisionTree::train(&rows, &labels, TreeConfig::default()).unwrap();
        assert!(pruned.leaf_count() < full.leaf_count());
    }

    #[test]
    fn grid_search_prefers_accurate_thresholds() {
        let predictions = vec![pred(Polarity::Neutral, 0.9); 4];
        let matches = vec![(6, 0), (0, 0), (0, 0), (0, 0)];
        let gold = vec![Polarity::Positive, Polarity::Neutral, Polarity::Neutral, Polarity::Neutral];
        let report = grid_search(&predictions, &matches, &gold).unwrap();
        assert_eq!(report.best.accuracy, 1.0);
        assert_eq!(report.best.thresholds.t1, 1);
        // 6 s-values × Σt1 × Σn1 = 6 × 15 × 15
        assert_eq!(report.points.len(), 1350);
    }

    #[test]
    fn classify_pipeline_with_empty_lexicons() {
        let rows = vec![vector(&[0.0]), vector(&[1.0])];
        let tree = DecisionTree::train(&rows, &[Polarity::Neutral; 2], TreeConfig::default()).unwrap();
        let inst = CitationInstance::new("A", "B", "This is the best and most widely used method.", None);
        let th = Thresholds::default();
        assert_eq!(classify_pipeline(&inst, None, &LexiconBundle::empty(), &tree, &th), Polarity::Neutral);
        // best, most, widely used, most widely used: four positive hits
        let inst = CitationInstance::new("A", "B", "The best and most widely used method.", None);
        let v = extract::<f64>(&inst, None, &LexiconBundle::default());
        assert_eq!(v.get(Feature::PositiveWords), 4.0);
        assert_eq!(classify_pipeline(&inst, None, &LexiconBundle::default(), &tree, &th), Polarity::Positive);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn strong_positive_dominates(pos in 0usize..20, neg in 0usize..20, conf in 0.0f64..=1.0, k in 0usize..3) {
            let th = Thresholds::default();
            let out = postprocess(&pred(Polarity::ALL[k], conf), pos, neg, &th);
            if pos as i64 - neg as i64 > th.t1 {
                prop_assert_eq!(out, Polarity::Positive);
            }
            prop_assert_eq!(postprocess(&pred(Polarity::ALL[k], conf.max(1e-9)), pos, neg, &Thresholds::disabled()), Polarity::ALL[k]);
        }

        #[test]
        fn chosen_split_has_max_gain_ratio(seed in 0u64..1000) {
            let (rows, labels) = random_dataset(seed, 40);
            let (_, audit) = DecisionTree::train_with_audit(&rows, &labels, TreeConfig::unpruned()).unwrap();
            for node in audit {
                for c in node.candidates {
                    prop_assert!(node.chosen >= c);
                }
            }
        }

        #[test]
        fn pruning_never_adds_leaves(seed in 0u64..1000, cf in 0.05f64..0.5) {
            let (rows, labels) = random_dataset(seed, 60);
            let full = DecisionTree::train(&rows, &labels, TreeConfig::unpruned()).unwrap();
            let pruned = DecisionTree::train(&rows, &labels, TreeConfig { pruning_confidence: Some(cf), ..TreeConfig::default() }).unwrap();
            prop_assert!(pruned.leaf_count() <= full.leaf_count());
        }
    }
}
