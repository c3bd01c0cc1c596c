use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library reports. The variant name doubles as the
/// error name printed by the command-line tool.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("annotation {id}: surface {surface:?} does not match text slice {slice:?}")]
    OffsetMismatch {
        id: String,
        surface: String,
        slice: String,
    },

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("annotations {first} and {second} claim the same token")]
    OverlapError { first: String, second: String },

    #[error("ill-formed BIO sequence at position {position}: {label} without a compatible predecessor")]
    IllFormedSequence { position: usize, label: String },

    #[error("cannot split an empty corpus")]
    EmptyCorpus,

    #[error("invalid ratios {0:?}: must be non-negative and sum to 1")]
    InvalidRatios(Vec<f64>),

    #[error("malformed row {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("label {label:?} at line {line} is not in the label vocabulary")]
    LabelVocabularyError { line: usize, label: String },

    #[error("file not found: {0}")]
    FileMissing(PathBuf),

    #[error("token index {index} out of range for sentence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("numerical overflow: {0}")]
    NumericalOverflow(String),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("objective increased across {0} accepted steps")]
    DivergenceDetected(usize),

    #[error("model file version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u16, expected: u16 },

    #[error("corrupt model file: {0}")]
    CorruptFile(String),

    #[error("sequences differ in length: {gold} gold vs {pred} predicted")]
    LengthMismatch { gold: usize, pred: usize },

    #[error("predicted annotations reference unknown document {0:?}")]
    CrossDocumentAnnotation(String),

    #[error("annotation [{start}, {end}) is outside the text (length {len})")]
    OffsetOutOfRange { start: usize, end: usize, len: usize },

    #[error("unknown category {0:?}")]
    UnknownCategory(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{system} at {fraction}%: {source}")]
    Training {
        system: String,
        fraction: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid pattern: {0}")]
    Pattern(#[from] regex::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short variant name, used for the CLI's error line.
    pub fn name(&self) -> &'static str {
        match self {
            Error::MalformedLine { .. } => "MalformedLine",
            Error::OffsetMismatch { .. } => "OffsetMismatch",
            Error::UnknownLabel(_) => "UnknownLabel",
            Error::OverlapError { .. } => "OverlapError",
            Error::IllFormedSequence { .. } => "IllFormedSequence",
            Error::EmptyCorpus => "EmptyCorpus",
            Error::InvalidRatios(_) => "InvalidRatios",
            Error::MalformedRow { .. } => "MalformedRow",
            Error::LabelVocabularyError { .. } => "LabelVocabularyError",
            Error::FileMissing(_) => "FileMissing",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NumericalOverflow(_) => "NumericalOverflow",
            Error::EmptyTrainingSet => "EmptyTrainingSet",
            Error::DivergenceDetected(_) => "DivergenceDetected",
            Error::VersionMismatch { .. } => "VersionMismatch",
            Error::CorruptFile(_) => "CorruptFile",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::CrossDocumentAnnotation(_) => "CrossDocumentAnnotation",
            Error::OffsetOutOfRange { .. } => "OffsetOutOfRange",
            Error::UnknownCategory(_) => "UnknownCategory",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Training { source, .. } => source.name(),
            Error::Pattern(_) => "Pattern",
            Error::Json(_) => "Json",
            Error::Io(_) => "Io",
        }
    }
}
