use std::fmt;

use thiserror::Error;

/// A syntax error with the byte offset at which parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub input: String,
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(input: &str, position: usize, message: impl Into<String>) -> Self {
        Self {
            input: input.to_string(),
            position,
            message: message.into(),
        }
    }

    /// Shifts the reported position by `offset`, re-anchoring it in `outer`.
    pub fn within(self, outer: &str, offset: usize) -> Self {
        Self {
            input: outer.to_string(),
            position: self.position + offset,
            message: self.message,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} at position {}", self.message, self.position)?;
        writeln!(f, "  {}", self.input)?;
        write!(f, "  {}^", " ".repeat(self.position.min(self.input.len())))
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Parse(#[from] ParseError),

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: u8, right: u8 },

    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: u8, rank: u8 },

    #[error("ill-formed infinite word: {0}")]
    SeamCancellation(String),

    #[error("empty period")]
    EmptyPeriod,

    #[error("cylinder of length {requested} exceeds table depth {depth}")]
    BeyondTableDepth { requested: usize, depth: usize },

    #[error("invalid measure table: {0}")]
    InvalidTable(String),

    #[error("invalid cylinder function: {0}")]
    InvalidFunction(String),

    #[error("group mismatch: expected {expected}, got {found}")]
    GroupMismatch { expected: String, found: String },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid finite action: {0}")]
    InvalidAction(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("point has only finitely many blocks of the designated generator")]
    FinitelyManyBlocks,

    #[error("depth and horizon must be positive")]
    ZeroHorizon,

    #[error("{0}")]
    Usage(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
