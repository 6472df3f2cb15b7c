//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A requested construction would exceed the configured edge cap.
    #[error("capacity exceeded: construction needs {requested} edges, cap is {cap}")]
    Capacity { requested: u128, cap: usize },

    /// A level or index parameter is outside its valid range.
    #[error("parameter out of range: {0}")]
    Range(String),

    /// A walk handed to `cycle_indicator` does not close up.
    #[error("edge walk is not a closed cycle: {0}")]
    WalkNotClosed(String),

    /// Chain input whose sub-copies are not nested.
    #[error("sub-copy addresses are not an increasing chain: {0}")]
    NotNested(String),

    /// Transportation problem whose values do not sum to zero.
    #[error("transportation problem is not zero-sum (sum = {0})")]
    NonzeroSum(String),

    /// Two chains assigned different images to the same cut vector.
    #[error("projection construction inconsistent: {0}")]
    InconsistentDefinition(String),

    /// Group closure grew past the configured cap.
    #[error("isometry group closure exceeded cap {cap} (reached {reached} elements)")]
    GroupCapExceeded { cap: usize, reached: usize },

    /// An operator handed to the lower-bound certificate is not invariant.
    #[error("operator is not invariant: {0}")]
    InvarianceViolated(String),

    /// A computed quantity disagrees with its closed-form value.
    #[error("computed value does not match closed form: {0}")]
    Mismatch(String),

    /// Malformed input file or JSON document.
    #[error("invalid input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
