use alloc::string::String;
use alloc::vec::Vec;

use crate::rational::Rational;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("search budget of {budget} states exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("integral diverges")]
    Divergent,
    #[error("curve resolution failed: {0}")]
    Resolution(String),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("mechanism is not truthful: h({others:?}) differs between probes", others = .0.others)]
    NotTruthful(alloc::boxed::Box<NotTruthfulEvidence>),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Two probe bids against the same opposing bids that produce different `h`
/// values. Truthful payments force `h` to be independent of the own bid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotTruthfulEvidence {
    pub others: Vec<Rational>,
    pub first_probe: Rational,
    pub first_h: Rational,
    pub second_probe: Rational,
    pub second_h: Rational,
}
