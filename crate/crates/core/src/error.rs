use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    /// The search ran out of budget before exhausting the tree. Distinct from
    /// an empty result, which is a proof that nothing exists.
    #[error("search incomplete: node budget of {budget} exhausted")]
    Incomplete { budget: u64 },

    /// The brute-force oracle refuses inputs that would blow up.
    #[error("brute-force guard exceeded: {0}")]
    GuardExceeded(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
