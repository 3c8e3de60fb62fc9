use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CuntzError {
    /// Operands from different algebras or backends, shape mismatches.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("index {index} out of range 1..{n} at byte {offset}")]
    IndexOutOfRange { index: u64, n: u32, offset: usize },

    /// A value outside an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exact computation was asked for something the exact field cannot hold.
    #[error("backend error: {0}")]
    Backend(String),

    #[error("term budget exceeded: {needed} terms needed, budget is {budget}")]
    TermBudget { needed: usize, budget: usize },

    #[error("numerical error: {0}")]
    Numeric(String),
}

pub type Result<T, E = CuntzError> = std::result::Result<T, E>;
