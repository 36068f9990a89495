use thiserror::Error;

/// Errors raised by evaluators, parsers and validators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QError {
    /// An argument lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An exact-mode value would be irrational (for example q^(1/2)).
    #[error("not representable in exact mode: {0}")]
    NonRepresentable(String),
    /// A series could not be certified within the requested policy.
    #[error("truncation error: {0}")]
    Truncation(String),
    /// A character table violates one of the Dirichlet character axioms.
    #[error("invalid character, axiom `{axiom}` violated: {detail}")]
    InvalidCharacter { axiom: &'static str, detail: String },
    #[error("parse error: {0}")]
    Parse(String),
}

impl QError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        QError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, QError>;
