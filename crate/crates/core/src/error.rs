use thiserror::Error;

use crate::graph::ConceptId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no edges")]
    NoEdges,

    #[error("language tag must be non-empty")]
    EmptyLanguage,

    #[error("concept id {0} out of range")]
    InvalidConcept(ConceptId),

    #[error("walk length {0} out of range (expected 1..=4)")]
    WalkLength(usize),

    #[error("tree level {0} out of range (expected 1..=5)")]
    TreeLevel(usize),

    #[error("context has zero tokens")]
    EmptyContext,

    #[error("path statistics have a zero denominator")]
    DegenerateStats,

    #[error("invalid config: {0}")]
    Config(String),

    #[error("no edge between {from} and {to}")]
    MissingEdge { from: String, to: String },

    #[error(transparent)]
    Index(#[from] IndexError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Failures reading a persisted graph index.
#[derive(Debug, Error)]
pub enum IndexError {
    #[error("not a graph index (bad magic)")]
    BadMagic,

    #[error("index format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("index file is truncated")]
    Truncated,

    #[error("index checksum mismatch (stored {stored:#018x}, computed {computed:#018x})")]
    Checksum { stored: u64, computed: u64 },

    #[error("corrupt index: {0}")]
    Corrupt(String),
}
