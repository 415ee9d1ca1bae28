//! Error type shared across the crate.

/// Errors reported by constructors, analytic operations and estimators.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter violates a precondition (nonpositive scale, empty grid, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two values that must agree in shape (length, bit depth) do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A requested bound is vacuous for these parameters (decay base >= 1).
    #[error("vacuous bound: decay base {decay_base} is not below 1")]
    VacuousBound { decay_base: f64 },

    /// The operation is not defined for this variant (e.g. sampling a
    /// union-of-subspaces model described only by its subspace count).
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A serialized ensemble or config file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
