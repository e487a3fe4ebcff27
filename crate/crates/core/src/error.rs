use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("could not factor {n}: cofactor {cofactor} resisted {budget} iterations")]
    FactorizationFailed { n: u64, cofactor: u64, budget: u64 },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    /// An identity that must hold by the underlying lemma failed on actual data.
    #[error("identity failure: {0}")]
    IdentityFailure(String),

    /// The class number formula produced a non-integral or non-positive 2-class number.
    #[error("class number formula inconsistent: 2^{exponent} is not a positive integer ({context})")]
    KurodaInconsistent { exponent: i64, context: String },

    /// A square test ran out of its size budget before deciding.
    #[error("square test indeterminate: {0}")]
    Indeterminate(String),

    #[error("cache error: {0}")]
    Cache(String),
}
