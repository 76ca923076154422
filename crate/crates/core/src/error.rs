use thiserror::Error;

/// Errors raised by the solver and its building blocks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Invalid material constants or problem geometry.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The collocation matrix is singular or too ill-conditioned to trust.
    #[error(
        "ill-conditioned system (n = {n}, p = a/l = {p}, nu = {nu}): condition estimate {condition:e}"
    )]
    IllConditioned {
        n: usize,
        p: f64,
        nu: f64,
        condition: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        op,
        detail: detail.into(),
    }
}
