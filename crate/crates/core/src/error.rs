use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input lies outside the surfaces or elements this crate handles
    /// (genus below two, elliptic elements, ...).
    #[error("out of scope: {0}")]
    OutOfScope(String),
    /// Input violates a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// A value set does not match the shape of its decomposition.
    #[error("malformed value set: {0}")]
    Structure(String),
    /// Branch continuation in the covering group lost accuracy.
    #[error("branch error: {0}")]
    Branch(String),
    /// The candidate space does not fit in a 64-bit index.
    #[error("candidate space too large to enumerate: {0}")]
    TooLarge(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
