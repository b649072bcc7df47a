//! Citation corpus ingestion.
//!
//! One citation instance per line, four tab-separated columns:
//! `source_id<TAB>target_id<TAB>polarity<TAB>sentence`. Polarity is one of
//! `p`, `o`, `n`; an empty polarity column marks an unlabeled instance.

use std::fmt;
use std::io::Write;
use std::ops::Add;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Neutral,
    Negative,
}

impl Polarity {
    /// Canonical class order used by every matrix and count triple.
    pub const ALL: [Polarity; 3] = [Polarity::Positive, Polarity::Neutral, Polarity::Negative];

    pub fn from_symbol(symbol: &str) -> Option<Self> {
        match symbol {
            "p" => Some(Polarity::Positive),
            "o" => Some(Polarity::Neutral),
            "n" => Some(Polarity::Negative),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Polarity::Positive => 'p',
            Polarity::Neutral => 'o',
            Polarity::Negative => 'n',
        }
    }

    /// +1, 0, -1.
    pub fn as_i8(self) -> i8 {
        match self {
            Polarity::Positive => 1,
            Polarity::Neutral => 0,
            Polarity::Negative => -1,
        }
    }

    pub fn from_i8(value: i8) -> Option<Self> {
        match value {
            1 => Some(Polarity::Positive),
            0 => Some(Polarity::Neutral),
            -1 => Some(Polarity::Negative),
            _ => None,
        }
    }

    /// Position in [`Polarity::ALL`].
    pub fn index(self) -> usize {
        match self {
            Polarity::Positive => 0,
            Polarity::Neutral => 1,
            Polarity::Negative => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Neutral => "neutral",
            Polarity::Negative => "negative",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationInstance {
    pub source_id: String,
    pub target_id: String,
    pub sentence: String,
    pub gold: Option<Polarity>,
}

impl CitationInstance {
    pub fn new(
        source_id: impl Into<String>,
        target_id: impl Into<String>,
        sentence: impl Into<String>,
        gold: Option<Polarity>,
    ) -> Self {
        CitationInstance {
            source_id: source_id.into(),
            target_id: target_id.into(),
            sentence: sentence.into(),
            gold,
        }
    }

    fn to_line(&self) -> String {
        let polarity = self.gold.map(|p| p.symbol().to_string()).unwrap_or_default();
        format!("{}\t{}\t{}\t{}", self.source_id, self.target_id, polarity, self.sentence)
    }
}

/// Layouts the loader understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    /// `source<TAB>target<TAB>polarity<TAB>sentence`, no header.
    #[default]
    Tsv,
}

pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Vec<CitationInstance>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text, format)
}

pub fn parse_corpus(text: &str, format: CorpusFormat) -> Result<Vec<CitationInstance>> {
    match format {
        CorpusFormat::Tsv => text
            .lines()
            .enumerate()
            .map(|(i, line)| parse_line(line, i + 1))
            .collect(),
    }
}

fn parse_line(line: &str, line_no: usize) -> Result<CitationInstance> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 4 {
        return Err(Error::Malformed {
            line: line_no,
            message: format!("expected 4 tab-separated columns, found {}", fields.len()),
        });
    }
    let (source, target, polarity, sentence) = (fields[0], fields[1], fields[2], fields[3]);
    if source.is_empty() || target.is_empty() {
        return Err(Error::Malformed {
            line: line_no,
            message: "empty paper id".into(),
        });
    }
    if sentence.trim().is_empty() {
        return Err(Error::Malformed {
            line: line_no,
            message: "empty sentence".into(),
        });
    }
    let gold = if polarity.is_empty() {
        None
    } else {
        Some(Polarity::from_symbol(polarity).ok_or_else(|| Error::UnknownPolarity {
            symbol: polarity.to_string(),
            line: line_no,
        })?)
    };
    Ok(CitationInstance::new(source, target, sentence, gold))
}

pub fn write_corpus<W: Write>(mut out: W, instances: &[CitationInstance]) -> std::io::Result<()> {
    for instance in instances {
        writeln!(out, "{}", instance.to_line())?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSplit {
    pub training: Vec<CitationInstance>,
    pub test: Vec<CitationInstance>,
}

/// First `n_train` instances in file order train, the rest test.
pub fn split_corpus(mut corpus: Vec<CitationInstance>, n_train: usize) -> Result<CorpusSplit> {
    if n_train > corpus.len() {
        return Err(Error::SplitOutOfRange {
            n_train,
            len: corpus.len(),
        });
    }
    let test = corpus.split_off(n_train);
    Ok(CorpusSplit {
        training: corpus,
        test,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub positive: usize,
    pub neutral: usize,
    pub negative: usize,
}

impl ClassCounts {
    pub fn new(positive: usize, neutral: usize, negative: usize) -> Self {
        ClassCounts {
            positive,
            neutral,
            negative,
        }
    }

    pub fn total(&self) -> usize {
        self.positive + self.neutral + self.negative
    }

    pub fn get(&self, class: Polarity) -> usize {
        match class {
            Polarity::Positive => self.positive,
            Polarity::Neutral => self.neutral,
            Polarity::Negative => self.negative,
        }
    }

    pub fn record(&mut self, class: Polarity) {
        match class {
            Polarity::Positive => self.positive += 1,
            Polarity::Neutral => self.neutral += 1,
            Polarity::Negative => self.negative += 1,
        }
    }

    pub fn from_labels<'a>(labels: impl IntoIterator<Item = &'a Polarity>) -> Self {
        let mut counts = ClassCounts::default();
        for &label in labels {
            counts.record(label);
        }
        counts
    }
}

impl Add for ClassCounts {
    type Output = ClassCounts;

    fn add(self, rhs: ClassCounts) -> ClassCounts {
        ClassCounts::new(
            self.positive + rhs.positive,
            self.neutral + rhs.neutral,
            self.negative + rhs.negative,
        )
    }
}

impl fmt::Display for ClassCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "positive {:>6}  neutral {:>6}  negative {:>6}  total {:>6}",
            self.positive,
            self.neutral,
            self.negative,
            self.total()
        )
    }
}

pub fn class_counts(instances: &[CitationInstance]) -> Result<ClassCounts> {
    let mut counts = ClassCounts::default();
    for (index, instance) in instances.iter().enumerate() {
        counts.record(instance.gold.ok_or(Error::MissingGold { index })?);
    }
    Ok(counts)
}

pub fn gold_labels(instances: &[CitationInstance]) -> Result<Vec<Polarity>> {
    instances
        .iter()
        .enumerate()
        .map(|(index, instance)| instance.gold.ok_or(Error::MissingGold { index }))
        .collect()
}
