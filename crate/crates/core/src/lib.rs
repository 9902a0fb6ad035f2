//! Exact construction and verification of social welfare functions on the
//! three-candidate Condorcet-cycle domain.

pub mod axioms;
pub mod combin;
pub mod csp;
pub mod domain;
pub mod doubleslice;
pub mod error;
pub mod exact;
pub mod families;
pub mod search;
pub mod slice;

pub use domain::{
    Ballot, Candidate, Election, RelResult, RelativeElection, SetFunctionWTL, SubsetMask,
    WeakOrdering, WeightVector,
};
pub use error::{Result, SwfError};
pub use exact::Rational;
