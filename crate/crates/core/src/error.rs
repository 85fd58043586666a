use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed WAV {path}: {reason}")]
    MalformedWav { path: PathBuf, reason: String },

    #[error(
        "unsupported WAV encoding in {path}: format tag {format_tag}, {bits_per_sample} bits, {channels} channel(s)"
    )]
    UnsupportedWav {
        path: PathBuf,
        format_tag: u16,
        bits_per_sample: u16,
        channels: u16,
    },

    #[error("utterance too short: {len} samples, need at least {frame_len}")]
    UtteranceTooShort { len: usize, frame_len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("training data contains a single class")]
    SingleClass,

    #[error("no files found in {0}")]
    EmptyDirectory(PathBuf),

    #[error("no parseable files in {0}")]
    NoParseableFiles(PathBuf),

    #[error("{path}, line {line}: {reason}")]
    MalformedCsv {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("schema mismatch: expected {expected} features, found {found}")]
    SchemaMismatch { expected: usize, found: usize },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
