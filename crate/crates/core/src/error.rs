use thiserror::Error;

/// Failure modes shared by the whole crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {param} {message}")]
    Domain { param: String, message: String },

    /// A series did not meet its tolerance within the allowed number of terms.
    #[error(
        "series did not converge within {terms} terms (partial sum {partial_sum:e}, last term magnitude {last_term:e})"
    )]
    Truncation {
        terms: usize,
        partial_sum: f64,
        last_term: f64,
    },

    /// A solution series is growing instead of converging.
    #[error("divergence: {0}")]
    Divergence(String),

    /// Caller supplied inconsistent data (mismatched lengths, wrong grid).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The Laplace integral cannot be truncated to the requested tolerance.
    #[error("horizon error: {0}")]
    Horizon(String),

    /// A numerical evaluation produced a non-finite value.
    #[error("evaluation error: {0}")]
    Evaluation(String),
}

impl Error {
    pub(crate) fn domain(param: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Domain {
            param: param.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
