//! Fixed-order feature vectors for citation sentences.
//!
//! | column | meaning |
//! |---|---|
//! | `AS` | 100 × summed word scores from the scored lexicon |
//! | `PPW`, `NPW` | positive n-gram / negative word matches |
//! | `POS_*` | adjective, adverb, foreign-word tags and adverb→adjective pairs |
//! | `DEP_*` | `advmod`, `acomp`, `amod` relation counts |
//! | `OL1_*`, `OL2_*` | opinion lexicon positive / negative matches |
//!
//! Self-citation is exposed through [`is_self_citation`] but is not a column.

use std::io::Write;
use std::path::Path;

use num_traits::Float;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{CitationInstance, Polarity};
use crate::error::{Error, Result};
use crate::lexicons::{match_ngrams, tokenize, LexiconBundle, ScoredLexicon};

pub const FEATURE_COUNT: usize = 14;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "AS",
    "PPW",
    "NPW",
    "POS_adj",
    "POS_adv",
    "POS_fw",
    "POS_adv_adj",
    "DEP_advmod",
    "DEP_acomp",
    "DEP_amod",
    "OL1_pos",
    "OL1_neg",
    "OL2_pos",
    "OL2_neg",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feature {
    AutomaticSentiment = 0,
    PositiveWords,
    NegativeWords,
    PosAdjective,
    PosAdverb,
    PosForeign,
    PosAdverbAdjective,
    DepAdvmod,
    DepAcomp,
    DepAmod,
    Ol1Positive,
    Ol1Negative,
    Ol2Positive,
    Ol2Negative,
}

impl Feature {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        FEATURE_NAMES[self.index()]
    }
}

/// Identifier of the column order; stored in model and feature-matrix
/// headers so vectors and models from different orders are never mixed.
pub fn feature_order_hash() -> String {
    let digest = Sha256::digest(FEATURE_NAMES.join(",").as_bytes());
    hex::encode(&digest[..8])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector<T> {
    values: [T; FEATURE_COUNT],
}

impl<T: Float> FeatureVector<T> {
    pub fn zeros() -> Self {
        FeatureVector {
            values: [T::zero(); FEATURE_COUNT],
        }
    }

    pub fn from_values(values: [T; FEATURE_COUNT]) -> Self {
        FeatureVector { values }
    }

    pub fn get(&self, feature: Feature) -> T {
        self.values[feature.index()]
    }

    pub fn set(&mut self, feature: Feature, value: T) {
        self.values[feature.index()] = value;
    }

    pub fn set_count(&mut self, feature: Feature, count: usize) {
        self.set(feature, T::from(count).expect("count fits in float"));
    }

    pub fn values(&self) -> &[T; FEATURE_COUNT] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T; FEATURE_COUNT] {
        &mut self.values
    }

    /// Lexicon match counts used by the post-processing cascade.
    pub fn match_counts(&self) -> (i64, i64) {
        let count = |f| self.get(f).to_i64().unwrap_or(0);
        (count(Feature::PositiveWords), count(Feature::NegativeWords))
    }
}

impl<T: Float> Default for FeatureVector<T> {
    fn default() -> Self {
        Self::zeros()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dependency {
    pub relation: String,
    /// 1-based token index, 0 for the root.
    pub head: usize,
    /// 1-based token index.
    pub dependent: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntacticAnnotation {
    pub pos_tags: Vec<(String, String)>,
    pub dependencies: Vec<Dependency>,
}

impl SyntacticAnnotation {
    pub fn from_tags<'a>(tags: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        SyntacticAnnotation {
            pos_tags: tags.into_iter().map(|(w, t)| (w.to_string(), t.to_string())).collect(),
            dependencies: Vec::new(),
        }
    }

    pub fn with_dependency(mut self, relation: &str, head: usize, dependent: usize) -> Self {
        self.dependencies.push(Dependency {
            relation: relation.to_string(),
            head,
            dependent,
        });
        self
    }

    fn validate(&self, line: usize) -> Result<()> {
        let n = self.pos_tags.len();
        for dep in &self.dependencies {
            if dep.head > n || dep.dependent == 0 || dep.dependent > n {
                return Err(Error::Annotation(format!(
                    "block ending line {line}: {}({}, {}) out of range for {n} tokens",
                    dep.relation, dep.head, dep.dependent
                )));
            }
        }
        Ok(())
    }
}

/// Reads the annotation sidecar: one block per corpus line, each terminated
/// by a blank line. A block holds `token<TAB>TAG` lines and
/// `#dep<TAB>relation<TAB>head<TAB>dependent` lines. An extra blank line
/// encodes an empty block.
pub fn parse_annotations(text: &str) -> Result<Vec<SyntacticAnnotation>> {
    let mut blocks = Vec::new();
    let mut current = SyntacticAnnotation::default();
    let mut open = false;
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        if line.is_empty() {
            current.validate(line_no)?;
            blocks.push(std::mem::take(&mut current));
            open = false;
            continue;
        }
        open = true;
        let fields: Vec<&str> = line.split('\t').collect();
        let bad = |message: &str| Error::Annotation(format!("line {line_no}: {message}"));
        if fields[0] == "#dep" {
            if fields.len() != 4 {
                return Err(bad("expected #dep<TAB>relation<TAB>head<TAB>dependent"));
            }
            let index = |s: &str| s.parse::<usize>().map_err(|_| bad(&format!("bad index '{s}'")));
            current.dependencies.push(Dependency {
                relation: fields[1].to_string(),
                head: index(fields[2])?,
                dependent: index(fields[3])?,
            });
        } else {
            if fields.len() != 2 || fields[1].is_empty() {
                return Err(bad("expected token<TAB>TAG"));
            }
            current.pos_tags.push((fields[0].to_string(), fields[1].to_string()));
        }
    }
    if open {
        current.validate(last_line)?;
        blocks.push(current);
    }
    Ok(blocks)
}

pub fn load_annotations(path: impl AsRef<Path>) -> Result<Vec<SyntacticAnnotation>> {
    let path = path.as_ref();
    parse_annotations(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_annotations<W: Write>(mut out: W, blocks: &[SyntacticAnnotation]) -> std::io::Result<()> {
    for block in blocks {
        for (token, tag) in &block.pos_tags {
            writeln!(out, "{token}\t{tag}")?;
        }
        for dep in &block.dependencies {
            writeln!(out, "#dep\t{}\t{}\t{}", dep.relation, dep.head, dep.dependent)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

// Tag strings are matched literally.
const ADJECTIVE_TAGS: [&str; 4] = ["JJ", "JJR", "JJS", "JJT"];
const ADVERB_TAGS: [&str; 5] = ["RB", "RBR", "RBT", "RN", "RT"];
const FOREIGN_TAG: &str = "FW";

fn is_adjective(tag: &str) -> bool {
    ADJECTIVE_TAGS.contains(&tag)
}

fn is_adverb(tag: &str) -> bool {
    ADVERB_TAGS.contains(&tag)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PosCounts {
    pub adjectives: usize,
    pub adverbs: usize,
    pub foreign: usize,
    /// Adverb immediately followed by an adjective.
    pub adverb_adjective: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DepCounts {
    pub advmod: usize,
    pub acomp: usize,
    pub amod: usize,
}

pub fn pos_features(ann: &SyntacticAnnotation) -> PosCounts {
    let tags: Vec<&str> = ann.pos_tags.iter().map(|(_, t)| t.as_str()).collect();
    PosCounts {
        adjectives: tags.iter().filter(|t| is_adjective(t)).count(),
        adverbs: tags.iter().filter(|t| is_adverb(t)).count(),
        foreign: tags.iter().filter(|&&t| t == FOREIGN_TAG).count(),
        adverb_adjective: tags
            .windows(2)
            .filter(|w| is_adverb(w[0]) && is_adjective(w[1]))
            .count(),
    }
}

pub fn dep_features(ann: &SyntacticAnnotation) -> DepCounts {
    let mut counts = DepCounts::default();
    for dep in &ann.dependencies {
        match dep.relation.as_str() {
            "advmod" => counts.advmod += 1,
            "acomp" => counts.acomp += 1,
            "amod" => counts.amod += 1,
            _ => {}
        }
    }
    counts
}

pub fn is_self_citation(instance: &CitationInstance) -> bool {
    instance.source_id == instance.target_id
}

pub fn automatic_sentiment<T: Float>(sentence: &str, lexicon: &ScoredLexicon) -> T {
    // fold from +0.0: an empty f64 `sum()` is -0.0, which would print as "-0"
    let sum = tokenize(sentence).iter().filter_map(|w| lexicon.score(w)).fold(0.0, |a, b| a + b);
    T::from(100.0 * sum).expect("finite score")
}

pub fn extract<T: Float>(
    instance: &CitationInstance,
    annotation: Option<&SyntacticAnnotation>,
    lexicons: &LexiconBundle,
) -> FeatureVector<T> {
    use Feature::*;

    let tokens = tokenize(&instance.sentence);
    let mut v = FeatureVector::zeros();
    v.set(AutomaticSentiment, automatic_sentiment(&instance.sentence, &lexicons.scored));
    v.set_count(PositiveWords, match_ngrams(&tokens, &lexicons.positive_ngrams));
    v.set_count(NegativeWords, match_ngrams(&tokens, &lexicons.negative_words));
    if let Some(ann) = annotation {
        let pos = pos_features(ann);
        v.set_count(PosAdjective, pos.adjectives);
        v.set_count(PosAdverb, pos.adverbs);
        v.set_count(PosForeign, pos.foreign);
        v.set_count(PosAdverbAdjective, pos.adverb_adjective);
        let dep = dep_features(ann);
        v.set_count(DepAdvmod, dep.advmod);
        v.set_count(DepAcomp, dep.acomp);
        v.set_count(DepAmod, dep.amod);
    }
    v.set_count(Ol1Positive, lexicons.ol1.count_positive(&tokens));
    v.set_count(Ol1Negative, lexicons.ol1.count_negative(&tokens));
    v.set_count(Ol2Positive, lexicons.ol2.count_positive(&tokens));
    v.set_count(Ol2Negative, lexicons.ol2.count_negative(&tokens));
    v
}

/// Extracts every instance; `annotations`, when given, must align 1:1.
pub fn extract_all<T: Float>(
    instances: &[CitationInstance],
    annotations: Option<&[SyntacticAnnotation]>,
    lexicons: &LexiconBundle,
) -> Result<Vec<FeatureVector<T>>> {
    if let Some(anns) = annotations {
        if anns.len() != instances.len() {
            return Err(Error::Annotation(format!(
                "{} annotation blocks for {} corpus lines",
                anns.len(),
                instances.len()
            )));
        }
    }
    Ok(instances
        .iter()
        .enumerate()
        .map(|(i, inst)| extract(inst, annotations.map(|a| &a[i]), lexicons))
        .collect())
}

/// CSV export: a `# citerank-features v1 <hash>` line, then a header naming
/// the 14 columns plus `gold`.
pub fn write_feature_matrix<T: Float + std::fmt::Display, W: Write>(
    mut out: W,
    vectors: &[FeatureVector<T>],
    gold: &[Option<Polarity>],
) -> Result<()> {
    writeln!(out, "# citerank-features v1 {}", feature_order_hash()).map_err(|e| Error::io("<feature matrix>", e))?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(FEATURE_NAMES.iter().copied().chain(["gold"]))?;
    for (i, v) in vectors.iter().enumerate() {
        let mut record: Vec<String> = v.values().iter().map(|x| x.to_string()).collect();
        record.push(gold.get(i).copied().flatten().map(|p| p.as_i8().to_string()).unwrap_or_default());
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::io("<feature matrix>", e))?;
    Ok(())
}
