use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated validity condition of a theorem or approximation is not met.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("capacity exceeded: {what} (limit {limit}, requested {requested})")]
    Capacity {
        what: &'static str,
        limit: u64,
        requested: u64,
    },

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("degenerate bound: {0}")]
    DegenerateBound(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
