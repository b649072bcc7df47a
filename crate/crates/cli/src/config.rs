//! Run configuration: a `key = value` file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use citerank::classifier::{Thresholds, TreeConfig};
use citerank::lexicons::split_pair_spec;
use clap::{Args, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolaritySource {
    Gold,
    Predicted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subset {
    All,
    Training,
    Test,
}

/// Flags shared by every subcommand. Each one can also be set in the config
/// file under the same name without the leading dashes.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Config file of `key = value` lines
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Annotation sidecar aligned with the corpus
    #[arg(long, global = true)]
    pub annotations: Option<PathBuf>,
    /// Scored word lexicon (`word<TAB>score`)
    #[arg(long, global = true)]
    pub lexicon_swn: Option<PathBuf>,
    /// Positive citation n-grams; defaults to the bundled list
    #[arg(long, global = true)]
    pub lexicon_pos_ngrams: Option<PathBuf>,
    /// Negative citation words; defaults to the bundled list
    #[arg(long, global = true)]
    pub lexicon_neg_words: Option<PathBuf>,
    /// Opinion lexicon 1 as `positive.txt,negative.txt`
    #[arg(long, global = true)]
    pub lexicon_ol1: Option<String>,
    /// Opinion lexicon 2 as `positive.txt,negative.txt`
    #[arg(long, global = true)]
    pub lexicon_ol2: Option<String>,
    /// Model file; defaults to `<out>/model.tree`
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t1: Option<i64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub n1: Option<i64>,
    #[arg(long, global = true)]
    pub s1: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t2: Option<i64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub n2: Option<i64>,
    /// Number of leading corpus lines used for training
    #[arg(long, global = true)]
    pub split: Option<usize>,
    #[arg(long, global = true)]
    pub buckets: Option<usize>,
    /// Edge polarity used for ranking
    #[arg(long, global = true, value_enum)]
    pub polarity: Option<PolaritySource>,
    /// Which part of the corpus to rank
    #[arg(long, global = true, value_enum)]
    pub subset: Option<Subset>,
    #[arg(long, global = true)]
    pub min_leaf: Option<usize>,
    #[arg(long, global = true)]
    pub pruning_confidence: Option<f64>,
    /// Grow the tree without pruning
    #[arg(long, global = true)]
    pub no_prune: bool,
}

macro_rules! overlay {
    ($top:expr, $base:expr; $($field:ident),*) => {
        $( if $top.$field.is_none() { $top.$field = $base.$field.clone(); } )*
    };
}

impl Flags {
    fn overlay(mut self, base: &Flags) -> Flags {
        overlay!(self, base; corpus, annotations, lexicon_swn, lexicon_pos_ngrams, lexicon_neg_words,
            lexicon_ol1, lexicon_ol2, model, out, t1, n1, s1, t2, n2, split, buckets, polarity, subset,
            min_leaf, pruning_confidence);
        self.no_prune |= base.no_prune;
        self
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| anyhow::anyhow!("config line {line}: bad value '{value}' for {key}"))
}

/// Relative paths in the file resolve against the file's directory.
pub fn parse_config_file(text: &str, base_dir: &Path) -> Result<Flags> {
    let mut f = Flags::default();
    let path = |v: &str| base_dir.join(v);
    let pair = |v: &str| -> Result<String> {
        let (p, n) = split_pair_spec(v)?;
        Ok(format!("{},{}", path(p).display(), path(n).display()))
    };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {line_no}: expected key = value");
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "corpus" => f.corpus = Some(path(value)),
            "annotations" => f.annotations = Some(path(value)),
            "lexicon-swn" => f.lexicon_swn = Some(path(value)),
            "lexicon-pos-ngrams" => f.lexicon_pos_ngrams = Some(path(value)),
            "lexicon-neg-words" => f.lexicon_neg_words = Some(path(value)),
            "lexicon-ol1" => f.lexicon_ol1 = Some(pair(value)?),
            "lexicon-ol2" => f.lexicon_ol2 = Some(pair(value)?),
            "model" => f.model = Some(path(value)),
            "out" => f.out = Some(path(value)),
            "t1" => f.t1 = Some(parse_value(key, value, line_no)?),
            "n1" => f.n1 = Some(parse_value(key, value, line_no)?),
            "s1" => f.s1 = Some(parse_value(key, value, line_no)?),
            "t2" => f.t2 = Some(parse_value(key, value, line_no)?),
            "n2" => f.n2 = Some(parse_value(key, value, line_no)?),
            "split" => f.split = Some(parse_value(key, value, line_no)?),
            "buckets" => f.buckets = Some(parse_value(key, value, line_no)?),
            "polarity" => {
                f.polarity = Some(PolaritySource::from_str(value, false).map_err(anyhow::Error::msg)?)
            }
            "subset" => f.subset = Some(Subset::from_str(value, false).map_err(anyhow::Error::msg)?),
            "min-leaf" => f.min_leaf = Some(parse_value(key, value, line_no)?),
            "pruning-confidence" => f.pruning_confidence = Some(parse_value(key, value, line_no)?),
            "prune" => f.no_prune = !parse_value::<bool>(key, value, line_no)?,
            other => bail!("config line {line_no}: unknown key '{other}'"),
        }
    }
    Ok(f)
}

/// An input named on the command line or in the config file does not exist.
/// Reported with exit code 2.
#[derive(Debug)]
pub struct MissingPath(pub PathBuf);

impl std::fmt::Display for MissingPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "file not found: {}", self.0.display())
    }
}

impl std::error::Error for MissingPath {}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LexiconPaths {
    pub swn: Option<PathBuf>,
    pub pos_ngrams: Option<PathBuf>,
    pub neg_words: Option<PathBuf>,
    pub ol1: Option<(PathBuf, PathBuf)>,
    pub ol2: Option<(PathBuf, PathBuf)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub lexicons: LexiconPaths,
    pub model: PathBuf,
    pub out: PathBuf,
    pub thresholds: Thresholds,
    pub split: usize,
    pub buckets: usize,
    pub polarity: PolaritySource,
    pub subset: Subset,
    pub tree: TreeConfig,
}

pub const DEFAULT_SPLIT: usize = 6736;
pub const DEFAULT_BUCKETS: usize = 5;

impl RunConfig {
    pub fn resolve(flags: Flags) -> Result<Self> {
        let flags = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                let base = path.parent().unwrap_or(Path::new("."));
                flags.clone().overlay(&parse_config_file(&text, base)?)
            }
            None => flags,
        };
        let defaults = Thresholds::default();
        let thresholds = Thresholds::new(
            flags.t1.unwrap_or(defaults.t1),
            flags.n1.unwrap_or(defaults.n1),
            flags.s1.unwrap_or(defaults.s1),
            flags.t2.unwrap_or(defaults.t2),
            flags.n2.unwrap_or(defaults.n2),
        )?;
        let pair = |spec: &Option<String>| -> Result<Option<(PathBuf, PathBuf)>> {
            spec.as_deref()
                .map(|s| split_pair_spec(s).map(|(p, n)| (PathBuf::from(p), PathBuf::from(n))))
                .transpose()
                .map_err(Into::into)
        };
        let out = flags.out.clone().unwrap_or_else(|| PathBuf::from("."));
        let tree_defaults = TreeConfig::default();
        let config = RunConfig {
            corpus: flags.corpus.clone(),
            annotations: flags.annotations.clone(),
            lexicons: LexiconPaths {
                swn: flags.lexicon_swn.clone(),
                pos_ngrams: flags.lexicon_pos_ngrams.clone(),
                neg_words: flags.lexicon_neg_words.clone(),
                ol1: pair(&flags.lexicon_ol1)?,
                ol2: pair(&flags.lexicon_ol2)?,
            },
            model: flags.model.clone().unwrap_or_else(|| out.join("model.tree")),
            out,
            thresholds,
            split: flags.split.unwrap_or(DEFAULT_SPLIT),
            buckets: flags.buckets.unwrap_or(DEFAULT_BUCKETS),
            polarity: flags.polarity.unwrap_or(PolaritySource::Gold),
            subset: flags.subset.unwrap_or(Subset::All),
            tree: TreeConfig {
                min_leaf: flags.min_leaf.unwrap_or(tree_defaults.min_leaf),
                pruning_confidence: if flags.no_prune {
                    None
                } else {
                    Some(flags.pruning_confidence.unwrap_or(0.25))
                },
                max_depth: None,
            },
        };
        if config.buckets == 0 {
            bail!("--buckets must be positive");
        }
        Ok(config)
    }

    /// Input files that must exist before any work starts.
    pub fn check_inputs(&self, need_model: bool) -> Result<()> {
        let l = &self.lexicons;
        let mut paths: Vec<&Path> = Vec::new();
        paths.extend(self.corpus.as_deref());
        paths.extend(self.annotations.as_deref());
        paths.extend(l.swn.as_deref());
        paths.extend(l.pos_ngrams.as_deref());
        paths.extend(l.neg_words.as_deref());
        for (p, n) in l.ol1.iter().chain(&l.ol2) {
            paths.push(p);
            paths.push(n);
        }
        if need_model {
            paths.push(&self.model);
        }
        match paths.into_iter().find(|p| !p.exists()) {
            Some(missing) => Err(MissingPath(missing.to_path_buf()).into()),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_parameters() {
        let c = RunConfig::resolve(Flags::default()).unwrap();
        assert_eq!(c.thresholds, Thresholds::default());
        assert_eq!((c.split, c.buckets), (6736, 5));
        assert_eq!(c.model, PathBuf::from("./model.tree"));
        assert_eq!(c.tree.pruning_confidence, Some(0.25));
    }

    #[test]
    fn file_values_yield_to_flags() {
        let file = parse_config_file(
            "# run\ncorpus = data/c.tsv\nt1 = 4\nsplit=10\nlexicon-ol1 = p.txt,n.txt\nprune = false\n",
            Path::new("/base"),
        )
        .unwrap();
        let flags = Flags {
            t1: Some(5),
            ..Flags::default()
        }
        .overlay(&file);
        assert_eq!(flags.corpus, Some(PathBuf::from("/base/data/c.tsv")));
        assert_eq!(flags.t1, Some(5));
        assert_eq!(flags.split, Some(10));
        assert_eq!(flags.lexicon_ol1.as_deref(), Some("/base/p.txt,/base/n.txt"));
        let c = RunConfig::resolve(flags).unwrap();
        assert_eq!(c.tree.pruning_confidence, None);
    }

    #[test]
    fn bad_config_lines() {
        assert!(parse_config_file("nonsense\n", Path::new(".")).is_err());
        assert!(parse_config_file("colour = red\n", Path::new(".")).is_err());
        assert!(parse_config_file("t1 = three\n", Path::new(".")).is_err());
        assert!(parse_config_file("polarity = guessed\n", Path::new(".")).is_err());
    }

    #[test]
    fn invalid_thresholds_rejected() {
        let flags = Flags {
            t1: Some(1),
            t2: Some(2),
            ..Flags::default()
        };
        assert!(RunConfig::resolve(flags).is_err());
    }
}
