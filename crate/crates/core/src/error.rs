use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A hypothesis of the inequality being exercised does not hold.
    #[error("hypothesis `{condition}` violated: {detail}")]
    Hypothesis { condition: &'static str, detail: String },
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn hypothesis(condition: &'static str, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            condition,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
