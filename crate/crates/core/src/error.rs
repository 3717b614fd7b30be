use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("every entry of the distribution has zero probability")]
    AllZeroSupport,

    #[error("unknown token id {id} for a vocabulary of size {size}")]
    UnknownToken { id: u32, size: usize },

    #[error("unknown surface form {0:?}")]
    UnknownSurface(String),

    #[error("no table for source [{source_text}] and prefix [{prefix}]")]
    MissingEntry { source_text: String, prefix: String },

    #[error("enumeration of {count} sentences exceeds the limit of {limit}")]
    EnumerationTooLarge { count: f64, limit: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("table {table} is not normalized (sum {sum})")]
    Normalization { table: String, sum: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid sentence: {0}")]
    InvalidSentence(String),

    #[error("source sentence is empty")]
    EmptySource,

    #[error("models are not direction-compatible: {0}")]
    IncompatibleModels(String),

    #[error("source sentence is not in the distractor set")]
    NotInDistractors,

    #[error("hypothesis and reference counts differ ({hypotheses} vs {references})")]
    LengthMismatch { hypotheses: usize, references: usize },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("back-translator shares identity tag {0:?} with the evaluated system")]
    SameBackTranslator(String),

    #[error("handshake failed: {0}")]
    HandshakeFailed(String),

    #[error("no response within {0} ms")]
    Timeout(u64),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("remote error {code}: {message}")]
    Remote { code: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
