use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameters violate a type invariant or fall on an excluded branch.
    #[error("parameter error: {0}")]
    Param(String),

    /// The argument lies outside the region where the closed form is real and finite.
    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator or structural constant vanishes.
    #[error("singular: {0}")]
    Singular(String),

    /// The share restriction c*y - k*y' > 0 fails.
    #[error("share restriction violated: {0}")]
    Share(String),

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse { row: usize, column: String, message: String },

    #[error("validation error at row {row}: {message}")]
    Validation { row: usize, message: String },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("regressors are collinear: {0}")]
    Rank(String),

    #[error("insufficient observations: need at least {needed}, got {got}")]
    InsufficientObservations { needed: usize, got: usize },
}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Param(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn singular(msg: impl Into<String>) -> Error {
    Error::Singular(msg.into())
}
