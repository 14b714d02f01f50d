use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty input stream")]
    EmptyStream,

    #[error("stream ended after {got} symbols, expected at least {expected}")]
    StreamTooShort { expected: usize, got: usize },

    #[error("wildcard symbol fed to an exact fingerprint; use the holey variant")]
    WildcardInExactFingerprint,

    #[error("prefix of length {prefix} cannot be split out of a fingerprint of length {whole}")]
    LengthUnderflow { whole: u64, prefix: u64 },

    #[error("no assignment supplied for hole at offset {offset}")]
    IncompleteAssignment { offset: u64 },

    #[error("sequences of unequal length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("index {index} outside the valid range {lo}..={hi}")]
    OutOfRange { index: usize, lo: usize, hi: usize },

    #[error("bucket {j} holds no candidate")]
    EmptyBucket { j: u64 },

    #[error("position {pos} is not a wildcard")]
    NotAWildcard { pos: usize },

    #[error("stream carries {found} wildcards but the declared bound is {declared}")]
    TooManyWildcards { found: usize, declared: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
