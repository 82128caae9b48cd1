use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("index ({row}, {col}) out of range for order {n}")]
    IndexOutOfRange { n: usize, row: usize, col: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid flag spec: {0}")]
    InvalidSpec(String),

    #[error("order {n} exceeds the configured limit {limit}")]
    OrderTooLarge { n: usize, limit: usize },

    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("cardinality {p} outside [{low}, {high}] for order {n}")]
    OutOfRange { n: usize, p: u64, low: u64, high: u64 },

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
