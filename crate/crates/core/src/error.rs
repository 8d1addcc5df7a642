//! Crate-wide error type.

use crate::idset::RecordId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("record id must be a positive integer")]
    InvalidRecordId,

    #[error("duplicate record id {0}")]
    DuplicateRecordId(RecordId),

    #[error("corpus parse error at line {line}: {msg}")]
    CorpusParse { line: usize, msg: String },

    #[error("query parse error: {0}")]
    QueryParse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown ranking method `{0}`")]
    UnknownMethod(String),

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("analyzer mismatch: {0}")]
    AnalyzerMismatch(String),

    #[error("index format error: {0}")]
    IndexFormat(String),

    #[error("unsupported index format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("ranked entries must be unique members of the hitset")]
    MergePrecondition,

    #[error("invalid benchmark plan: {0}")]
    InvalidPlan(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
