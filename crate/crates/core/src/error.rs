use thiserror::Error;

/// Errors raised by the constructions and verifiers in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SwfError {
    #[error("voter count {n} outside the supported range 1..={max}")]
    VoterCount { n: usize, max: usize },
    #[error("candidate pair ({0}, {1}) is not a pair of distinct candidates")]
    InvalidPair(u8, u8),
    #[error("relative election for pair ({0}, {1}) is not of the form (i, i+1)")]
    WrongOrientation(u8, u8),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("value {value} is not allowed for pair ({i}, {j})")]
    ValueOutsideDomain { i: u8, j: u8, value: i8 },
    #[error("subset mask {bits:#x} has bits above voter {n}")]
    MaskOutOfRange { bits: u64, n: usize },
    #[error("pairwise results {0:?} form an inconsistent multiset")]
    ConsistencyViolation([crate::RelResult; 3]),
    #[error("the triple (g1, g2, g3) is not consistent")]
    InconsistentTriple,
    #[error("malformed permutation: {0}")]
    MalformedPermutation(String),
    #[error("group does not act transitively on the voters")]
    NonTransitiveGroup,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("scale unsupported: {0}")]
    BudgetExceeded(String),
    #[error("set function is not decreasing under inclusion")]
    PrViolation,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, SwfError>;
