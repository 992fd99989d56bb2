use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("division by zero")]
    DivisionByZero,

    /// Working precision ran out before a result could be certified.
    #[error("precision exhausted: {context} (need at least {needed} digits)")]
    PrecisionExhausted { context: String, needed: u32 },

    /// An exhaustive search would exceed its configured budget.
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported route: {0}")]
    Unsupported(String),

    /// Two independent decision routes disagreed.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by a resource limit rather than bad input.
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted { .. } | Error::BudgetExceeded { .. }
        )
    }
}
