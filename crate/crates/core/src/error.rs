use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input data (bad system document, bad element text).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A system axiom does not hold for the given data.
    #[error("axiom violation: {0}")]
    Axiom(String),

    /// Syntax error in an expression, with a byte offset into the text.
    #[error("parse error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    /// An operation was applied outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation's calling contract was violated.
    #[error("usage error: {0}")]
    Usage(String),
}
