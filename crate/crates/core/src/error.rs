use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input that violates a type invariant (asymmetric Gram, odd diagonal, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("subgroup is not isotropic: {0}")]
    NotIsotropic(String),

    #[error("isometry is not stable: {0}")]
    NotStable(String),

    /// A search would exceed its explicit budget.
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget { what: String, needed: u64, budget: u64 },

    /// A hypothesis required by the operation does not hold or cannot be
    /// verified.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("p-adic precision {given} is insufficient, need at least {required}")]
    Precision { given: u32, required: u32 },

    /// Internal invariant violation; indicates a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Refusals are well-formed requests the tool declines to answer
    /// (budget or hypothesis); everything else is bad input.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::Budget { .. } | Error::Hypothesis(_) | Error::Precision { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }
}
