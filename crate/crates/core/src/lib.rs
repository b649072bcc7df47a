//! Citation sentiment classification and sentiment-weighted ranking of cited papers.
//!
//! The pipeline runs in five stages:
//!
//! * [`corpus`] reads the tab-separated citation corpus and splits it,
//! * [`lexicons`] and [`features`] turn each citation sentence into a fixed
//!   14-column feature vector,
//! * [`classifier`] induces a gain-ratio decision tree and overrides its
//!   output with a lexicon-count threshold cascade,
//! * [`evaluation`] scores predictions and runs feature-group ablations,
//! * [`ranking`] builds the citation multigraph and ranks cited papers by raw
//!   citation count and by the reliability-weighted M-index.
//!
//! Numeric code is generic over the scalar type. The aliases below fix the
//! common instantiations: `f64` for everyday use, `f32` where memory matters,
//! and exact rationals for the ranking arithmetic.
//!
//! ```no_run
//! use citerank::classifier::{classify_vector, DecisionTree, Thresholds, TreeConfig};
//! use citerank::corpus::{gold_labels, load_corpus, split_corpus, CorpusFormat};
//! use citerank::features::extract_all;
//! use citerank::lexicons::LexiconBundle;
//!
//! let split = split_corpus(load_corpus("corpus.tsv", CorpusFormat::Tsv)?, 6736)?;
//! let bundle = LexiconBundle::default();
//! let rows = extract_all::<f64>(&split.training, None, &bundle)?;
//! let tree = DecisionTree::train(&rows, &gold_labels(&split.training)?, TreeConfig::default())?;
//! let test = extract_all::<f64>(&split.test, None, &bundle)?;
//! let labels: Vec<_> = test.iter().map(|v| classify_vector(&tree, v, &Thresholds::default())).collect();
//! # Ok::<(), citerank::Error>(())
//! ```

pub mod classifier;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod lexicons;
pub mod ranking;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact rational scalar; ranking scores over it carry no rounding at all.
pub type Rational = num_rational::Ratio<i64>;

pub type FeatureVector = features::FeatureVector<f64>;
pub type FeatureVectorF32 = features::FeatureVector<f32>;
pub type DecisionTree = classifier::DecisionTree<f64>;
pub type DecisionTreeF32 = classifier::DecisionTree<f32>;
pub type ClassMetrics = evaluation::ClassMetrics<f64>;
pub type ExactClassMetrics = evaluation::ClassMetrics<Rational>;
pub type RankedList = ranking::RankedList<f64>;
pub type ExactRankedList = ranking::RankedList<Rational>;
pub type ReliabilityScore = ranking::ReliabilityScore<f64>;
