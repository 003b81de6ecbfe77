//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A specification failed validation (bad parameters, non-monotone tails, ...).
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// An argument was outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The question cannot be decided from the given data (e.g. a tabulated
    /// grid too coarse to settle an activity question). Never a silent guess.
    #[error("indeterminate: {0}")]
    Indeterminate(String),

    /// A precondition of the operation does not hold for this input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A grid or renewal function does not cover the requested range.
    #[error("range not covered: needed {needed}, available up to {available}")]
    RangeNotCovered { needed: f64, available: f64 },

    /// A configured budget (evaluations, jump events, wall clock) would be exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
