use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("unknown polarity '{symbol}' at line {line}")]
    UnknownPolarity { symbol: String, line: usize },

    #[error("split point {n_train} out of range for corpus of {len} instances")]
    SplitOutOfRange { n_train: usize, len: usize },

    #[error("instance {index} has no gold polarity")]
    MissingGold { index: usize },

    #[error("invalid lexicon entry at line {line}: {message}")]
    Lexicon { line: usize, message: String },

    #[error("annotation error: {0}")]
    Annotation(String),

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("invalid thresholds: {0}")]
    Thresholds(String),

    #[error("model format: {0}")]
    Model(String),

    #[error("feature order mismatch: model has {model}, this build has {expected}")]
    FeatureOrderMismatch { model: String, expected: String },

    #[error("length mismatch: {gold} gold labels vs {predicted} predictions")]
    LengthMismatch { gold: usize, predicted: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("unknown feature group '{0}'")]
    UnknownGroup(String),

    #[error("unknown paper id '{0}'")]
    UnknownPaper(String),

    #[error("bucket count must be positive")]
    InvalidBucketCount,

    #[error("ranked lists cover different paper sets")]
    PaperSetMismatch,

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
