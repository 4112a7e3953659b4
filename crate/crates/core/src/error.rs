use thiserror::Error;

/// Errors raised by the library. Each variant names the class of failure so
/// front ends can map them onto stable exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QseraError {
    /// An argument lies outside the operation's domain (bad index, length
    /// mismatch, malformed table, ...).
    #[error("input domain error: {0}")]
    InputDomain(String),

    /// The rescaling range collapses to zero width.
    #[error("degenerate range: {0}")]
    DegenerateRange(String),

    /// The request exceeds the supported problem size.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The qubit layout cannot host the requested circuit.
    #[error("layout error: {0}")]
    Layout(String),

    /// A portfolio statistic was requested for the empty selection.
    #[error("undefined portfolio: {0}")]
    UndefinedPortfolio(String),

    /// A structural invariant of a domain type is violated.
    #[error("validation error: {0}")]
    Validation(String),

    /// Text input (JSON, circuit listing, CSV) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QseraError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(QseraError::InputDomain(msg.into()))
}
