use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A geometric construction failed (degenerate arccosh argument, chart
    /// that does not close, ...).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A configured budget (node count, unfolding enumeration, ball size)
    /// was exceeded. Carries the best bound obtained so far when one exists.
    #[error("resource budget exceeded: {context} (best bound so far: {best_bound:?})")]
    Resource {
        context: String,
        best_bound: Option<f64>,
    },

    /// A query target is unreachable in a disconnected graph.
    #[error("disconnected input: {0}")]
    Disconnected(String),

    /// Malformed surface record.
    #[error("parse error at line {line}, field {field}: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
