use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A malformed grid, cube, gauge, kernel or experiment description.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An experiment config violates a hypothesis of the inequality it targets.
    #[error("hypothesis `{name}` violated: {detail}")]
    Hypothesis { name: &'static str, detail: String },

    #[error("unknown inequality `{0}`")]
    UnknownInequality(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn hypothesis(name: &'static str, detail: impl Into<String>) -> Error {
    Error::Hypothesis {
        name,
        detail: detail.into(),
    }
}
