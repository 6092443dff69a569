//! Error type shared by all modules.

use thiserror::Error;

/// Library-wide error type.
///
/// The variants map onto the CLI exit-code contract: parameter/domain errors
/// are usage problems (exit 2), [`Error::Resource`] is a guard refusal
/// (exit 3), and violations found by self-checks are reported as data, not as
/// errors.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A textual description (coefficient, set spec, formula id) failed to parse.
    #[error("description error: {0}")]
    Description(String),
    /// Inconsistent inputs (for example a gcd argument that is not the gcd).
    #[error("consistency error: {0}")]
    Consistency(String),
    /// A resource guard refused the computation (range cap, enumeration guard).
    #[error("resource guard: {0}")]
    Resource(String),
    /// Working precision was exhausted before the requested output was determined.
    #[error("precision exhausted: {0}")]
    Precision(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn description(msg: impl Into<String>) -> Self {
        Error::Description(msg.into())
    }
    pub fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
    pub fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
