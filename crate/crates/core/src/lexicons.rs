//! Word lists behind the lexical features.
//!
//! Tokens are produced by splitting on whitespace and passing each piece
//! through [`normalize`]: lowercase, then strip every leading and trailing
//! character that is not alphanumeric. Internal punctuation such as the
//! hyphens in `state-of-the-art` survives. Tokens that normalize to the empty
//! string are dropped.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use crate::corpus::Polarity;
use crate::error::{Error, Result};

/// Longest n-gram an [`NGramLexicon`] may hold.
pub const MAX_NGRAM: usize = 4;

const DEFAULT_POSITIVE_NGRAMS: &str = include_str!("../data/positive_ngrams.tsv");
const DEFAULT_NEGATIVE_WORDS: &str = include_str!("../data/negative_words.tsv");

pub fn normalize(token: &str) -> String {
    token
        .to_lowercase()
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_string()
}

pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split_whitespace()
        .map(normalize)
        .filter(|t| !t.is_empty())
        .collect()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Word → real-valued sentiment score.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoredLexicon {
    entries: HashMap<String, f64>,
}

impl ScoredLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry unless the normalized word is already present.
    pub fn insert(&mut self, word: &str, score: f64) {
        let key = normalize(word);
        if !key.is_empty() {
            self.entries.entry(key).or_insert(score);
        }
    }

    pub fn score(&self, normalized: &str) -> Option<f64> {
        self.entries.get(normalized).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `word<TAB>score` per line; blank lines are skipped. The first score
    /// seen for a word wins.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lexicon = ScoredLexicon::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| Error::Lexicon { line: i + 1, message };
            let (word, score) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected word<TAB>score".into()))?;
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|_| bad(format!("unparseable score '{}'", score.trim())))?;
            if !score.is_finite() {
                return Err(bad(format!("non-finite score '{score}'")));
            }
            if normalize(word).is_empty() {
                return Err(bad("empty word".into()));
            }
            lexicon.insert(word, score);
        }
        Ok(lexicon)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&read(path.as_ref())?)
    }
}

/// Set of 1- to 4-grams carrying one polarity. Frequencies from the source
/// list are kept as metadata only; matching is by presence.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramLexicon {
    entries: HashSet<String>,
    frequencies: BTreeMap<String, u64>,
    polarity: Polarity,
    longest: usize,
}

impl NGramLexicon {
    pub fn new(polarity: Polarity) -> Self {
        NGramLexicon {
            entries: HashSet::new(),
            frequencies: BTreeMap::new(),
            polarity,
            longest: 0,
        }
    }

    pub fn from_phrases<'a>(polarity: Polarity, phrases: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut lexicon = Self::new(polarity);
        for (i, phrase) in phrases.into_iter().enumerate() {
            lexicon.insert(phrase, None, i + 1)?;
        }
        Ok(lexicon)
    }

    fn insert(&mut self, phrase: &str, frequency: Option<u64>, line: usize) -> Result<()> {
        let tokens = tokenize(phrase);
        if tokens.is_empty() {
            return Err(Error::Lexicon {
                line,
                message: "empty n-gram".into(),
            });
        }
        if tokens.len() > MAX_NGRAM {
            return Err(Error::Lexicon {
                line,
                message: format!("{}-gram exceeds the {MAX_NGRAM}-token limit", tokens.len()),
            });
        }
        self.longest = self.longest.max(tokens.len());
        let key = tokens.join(" ");
        if let Some(f) = frequency {
            self.frequencies.entry(key.clone()).or_insert(f);
        }
        self.entries.insert(key);
        Ok(())
    }

    /// One n-gram per line, tokens separated by spaces, with an optional
    /// `<TAB>frequency` suffix.
    pub fn parse(text: &str, polarity: Polarity) -> Result<Self> {
        let mut lexicon = Self::new(polarity);
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (phrase, frequency) = match line.split_once('\t') {
                Some((phrase, freq)) => {
                    let f = freq.trim().parse::<u64>().map_err(|_| Error::Lexicon {
                        line: i + 1,
                        message: format!("unparseable frequency '{}'", freq.trim()),
                    })?;
                    (phrase, Some(f))
                }
                None => (line, None),
            };
            lexicon.insert(phrase, frequency, i + 1)?;
        }
        Ok(lexicon)
    }

    pub fn load(path: impl AsRef<Path>, polarity: Polarity) -> Result<Self> {
        Self::parse(&read(path.as_ref())?, polarity)
    }

    /// Positive citation n-grams shipped with the crate.
    pub fn default_positive() -> Self {
        Self::parse(DEFAULT_POSITIVE_NGRAMS, Polarity::Positive).expect("bundled list is well-formed")
    }

    /// Negative citation words shipped with the crate.
    pub fn default_negative() -> Self {
        Self::parse(DEFAULT_NEGATIVE_WORDS, Polarity::Negative).expect("bundled list is well-formed")
    }

    pub fn contains(&self, ngram: &[String]) -> bool {
        ngram.len() <= self.longest && self.entries.contains(&ngram.join(" "))
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn frequency(&self, phrase: &str) -> Option<u64> {
        self.frequencies.get(&tokenize(phrase).join(" ")).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of tokens in the longest entry.
    pub fn longest(&self) -> usize {
        self.longest
    }
}

/// Counts every window of 1..=4 normalized tokens found in `lexicon`.
/// Overlapping windows each count.
pub fn match_ngrams(tokens: &[String], lexicon: &NGramLexicon) -> usize {
    (1..=lexicon.longest().min(MAX_NGRAM))
        .map(|n| tokens.windows(n).filter(|w| lexicon.contains(w)).count())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpinionLabel {
    Ol1,
    Ol2,
}

/// Generic opinion word list split into positive and negative halves.
///
/// Words listed on both sides are removed from both, keeping the halves
/// disjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionLexiconPair {
    positive: HashSet<String>,
    negative: HashSet<String>,
    label: OpinionLabel,
}

impl OpinionLexiconPair {
    pub fn empty(label: OpinionLabel) -> Self {
        OpinionLexiconPair {
            positive: HashSet::new(),
            negative: HashSet::new(),
            label,
        }
    }

    pub fn from_words<'a>(
        label: OpinionLabel,
        positive: impl IntoIterator<Item = &'a str>,
        negative: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        let collect = |words: &mut dyn Iterator<Item = &'a str>| -> HashSet<String> {
            words.map(normalize).filter(|w| !w.is_empty()).collect()
        };
        let mut positive = collect(&mut positive.into_iter());
        let mut negative = collect(&mut negative.into_iter());
        let shared: Vec<String> = positive.intersection(&negative).cloned().collect();
        for word in &shared {
            positive.remove(word);
            negative.remove(word);
        }
        OpinionLexiconPair {
            positive,
            negative,
            label,
        }
    }

    /// One word per line; lines starting with `;` are comments.
    pub fn parse(positive: &str, negative: &str, label: OpinionLabel) -> Self {
        fn words(text: &str) -> impl Iterator<Item = &str> {
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with(';'))
        }
        Self::from_words(label, words(positive), words(negative))
    }

    pub fn load(positive: impl AsRef<Path>, negative: impl AsRef<Path>, label: OpinionLabel) -> Result<Self> {
        Ok(Self::parse(&read(positive.as_ref())?, &read(negative.as_ref())?, label))
    }

    pub fn label(&self) -> OpinionLabel {
        self.label
    }

    pub fn is_positive(&self, word: &str) -> bool {
        self.positive.contains(word)
    }

    pub fn is_negative(&self, word: &str) -> bool {
        self.negative.contains(word)
    }

    pub fn count_positive(&self, tokens: &[String]) -> usize {
        tokens.iter().filter(|t| self.positive.contains(t.as_str())).count()
    }

    pub fn count_negative(&self, tokens: &[String]) -> usize {
        tokens.iter().filter(|t| self.negative.contains(t.as_str())).count()
    }

    pub fn len(&self) -> (usize, usize) {
        (self.positive.len(), self.negative.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexiconKind {
    Scored,
    PositiveNGrams,
    NegativeWords,
    Opinion(OpinionLabel),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Lexicon {
    Scored(ScoredLexicon),
    NGram(NGramLexicon),
    Opinion(OpinionLexiconPair),
}

/// Loads one lexicon. Opinion pairs take `positive_path,negative_path`.
pub fn load_lexicon(spec: &str, kind: LexiconKind) -> Result<Lexicon> {
    Ok(match kind {
        LexiconKind::Scored => Lexicon::Scored(ScoredLexicon::load(spec)?),
        LexiconKind::PositiveNGrams => Lexicon::NGram(NGramLexicon::load(spec, Polarity::Positive)?),
        LexiconKind::NegativeWords => Lexicon::NGram(NGramLexicon::load(spec, Polarity::Negative)?),
        LexiconKind::Opinion(label) => {
            let (pos, neg) = split_pair_spec(spec)?;
            Lexicon::Opinion(OpinionLexiconPair::load(pos, neg, label)?)
        }
    })
}

pub fn split_pair_spec(spec: &str) -> Result<(&str, &str)> {
    spec.split_once(',')
        .filter(|(p, n)| !p.is_empty() && !n.is_empty())
        .ok_or_else(|| Error::Lexicon {
            line: 0,
            message: format!("opinion lexicon needs 'positive,negative' paths, got '{spec}'"),
        })
}

/// The five lexicons the feature extractor reads.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconBundle {
    pub scored: ScoredLexicon,
    pub positive_ngrams: NGramLexicon,
    pub negative_words: NGramLexicon,
    pub ol1: OpinionLexiconPair,
    pub ol2: OpinionLexiconPair,
}

impl LexiconBundle {
    pub fn empty() -> Self {
        LexiconBundle {
            scored: ScoredLexicon::new(),
            positive_ngrams: NGramLexicon::new(Polarity::Positive),
            negative_words: NGramLexicon::new(Polarity::Negative),
            ol1: OpinionLexiconPair::empty(OpinionLabel::Ol1),
            ol2: OpinionLexiconPair::empty(OpinionLabel::Ol2),
        }
    }

    /// Bundled citation n-gram lists; the scored and opinion lexicons start
    /// empty since their contents are user-supplied.
    pub fn with_default_citation_lists() -> Self {
        LexiconBundle {
            positive_ngrams: NGramLexicon::default_positive(),
            negative_words: NGramLexicon::default_negative(),
            ..Self::empty()
        }
    }
}

impl Default for LexiconBundle {
    fn default() -> Self {
        Self::with_default_citation_lists()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("Improves,"), "improves");
        assert_eq!(normalize("state-of-the-art"), "state-of-the-art");
        assert_eq!(normalize("(2007)"), "2007");
        assert_eq!(normalize("(Creutz,"), "creutz");
        assert_eq!(normalize("--"), "");
    }

    #[test]
    fn ngram_matches() {
        let lex = NGramLexicon::from_phrases(Polarity::Positive, ["most", "widely used"]).unwrap();
        assert_eq!(match_ngrams(&toks("most widely used"), &lex), 2);
        assert_eq!(match_ngrams(&[], &lex), 0);

        let lex = NGramLexicon::from_phrases(Polarity::Positive, ["widely used"]).unwrap();
        assert_eq!(match_ngrams(&toks("This parser is widely used."), &lex), 1);
    }

    #[test]
    fn overlapping_windows_each_count() {
        let lex = NGramLexicon::from_phrases(Polarity::Positive, ["most widely used", "widely used", "widely"]).unwrap();
        assert_eq!(match_ngrams(&toks("most widely used"), &lex), 3);
        let lex = NGramLexicon::from_phrases(Polarity::Positive, ["good good"]).unwrap();
        assert_eq!(match_ngrams(&toks("good good good"), &lex), 2);
    }

    #[test]
    fn ngram_file_loading() {
        let lex = NGramLexicon::parse("state of the art\nwidely used\t12\n\nwidely used\n", Polarity::Positive).unwrap();
        assert_eq!(lex.len(), 2);
        assert_eq!(lex.longest(), 4);
        assert_eq!(lex.frequency("Widely used"), Some(12));
        assert!(lex.contains(&toks("state of the art")));

        let err = NGramLexicon::parse("ok\none two three four five\n", Polarity::Positive).unwrap_err();
        assert!(matches!(err, Error::Lexicon { line: 2, .. }), "{err}");
        assert!(NGramLexicon::parse("fine\tmany\n", Polarity::Positive).is_err());
    }

    #[test]
    fn scored_file_loading() {
        let lex = ScoredLexicon::parse("good\t0.5\nGood\t0.9\nbad\t-0.25\n").unwrap();
        assert_eq!(lex.len(), 2);
        assert_eq!(lex.score("good"), Some(0.5));
        assert_eq!(lex.score("bad"), Some(-0.25));

        let err = ScoredLexicon::parse("good\t0.5\nbad\tminus\n").unwrap_err();
        assert!(matches!(err, Error::Lexicon { line: 2, .. }), "{err}");
        assert!(ScoredLexicon::parse("nodelimiter\n").is_err());
    }

    #[test]
    fn opinion_pair_loading() {
        let pair = OpinionLexiconPair::parse(
            "; positive words\ngood\nGreat\nenvious\n",
            ";\n; negative\nbad\nenvious\n",
            OpinionLabel::Ol1,
        );
        assert_eq!(pair.len(), (2, 1));
        assert!(pair.is_positive("great"));
        assert!(!pair.is_positive("envious") && !pair.is_negative("envious"));
        assert_eq!(pair.count_positive(&toks("good, great and good")), 3);
        assert_eq!(pair.count_negative(&toks("bad")), 1);
    }

    #[test]
    fn load_lexicon_dispatch() {
        let dir = tempfile::tempdir().unwrap();
        let pos = dir.path().join("pos.txt");
        let neg = dir.path().join("neg.txt");
        std::fs::write(&pos, "good\n").unwrap();
        std::fs::write(&neg, "bad\n").unwrap();
        let spec = format!("{},{}", pos.display(), neg.display());
        match load_lexicon(&spec, LexiconKind::Opinion(OpinionLabel::Ol2)).unwrap() {
            Lexicon::Opinion(pair) => assert_eq!(pair.label(), OpinionLabel::Ol2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(load_lexicon(pos.to_str().unwrap(), LexiconKind::Opinion(OpinionLabel::Ol1)).is_err());
        assert!(matches!(
            load_lexicon("/no/such/file", LexiconKind::Scored),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn bundled_lists() {
        let pos = NGramLexicon::default_positive();
        let neg = NGramLexicon::default_negative();
        assert_eq!(pos.frequency("more"), Some(397));
        assert!(pos.contains(&toks("state of the art")));
        assert_eq!(neg.frequency("However"), Some(125));
        assert!(neg.contains(&toks("not able to")));
        assert_eq!(pos.longest(), 4);
    }

    fn arb_tokens() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]).prop_map(String::from), 0..12)
    }

    fn arb_lexicon() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(
            prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 1..=4).prop_map(|v| v.join(" ")),
            0..8,
        )
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC{0,20}") {
            let once = normalize(&s);
            prop_assert_eq!(normalize(&once), once);
        }

        #[test]
        fn appending_never_decreases_matches(sentence in arb_tokens(), tail in arb_tokens(), entries in arb_lexicon()) {
            let lex = NGramLexicon::from_phrases(Polarity::Positive, entries.iter().map(String::as_str)).unwrap();
            let mut longer = sentence.clone();
            longer.extend(tail);
            prop_assert!(match_ngrams(&longer, &lex) >= match_ngrams(&sentence, &lex));
        }

        #[test]
        fn union_of_disjoint_lexicons_sums(sentence in arb_tokens(), a in arb_lexicon(), b in arb_lexicon()) {
            let b: Vec<String> = b.into_iter().filter(|e| !a.contains(e)).collect();
            let la = NGramLexicon::from_phrases(Polarity::Positive, a.iter().map(String::as_str)).unwrap();
            let lb = NGramLexicon::from_phrases(Polarity::Positive, b.iter().map(String::as_str)).unwrap();
            let lu = NGramLexicon::from_phrases(Polarity::Positive, a.iter().chain(&b).map(String::as_str)).unwrap();
            let (ma, mb, mu) = (match_ngrams(&sentence, &la), match_ngrams(&sentence, &lb), match_ngrams(&sentence, &lu));
            prop_assert!(mu >= ma.max(mb));
            prop_assert_eq!(mu, ma + mb);
        }
    }
}
