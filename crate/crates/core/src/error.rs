use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A network or game assumption required by the algorithm does not hold.
    #[error("assumption violation ({assumption}): {detail}")]
    AssumptionViolation {
        assumption: &'static str,
        detail: String,
    },

    #[error("degenerate game: {0}")]
    DegenerateGame(String),

    /// A non-finite value appeared in an iterate.
    #[error("numerical divergence in run {run} at iteration {iter}: {detail}")]
    Divergence { run: usize, iter: usize, detail: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn connectivity(detail: impl Into<String>) -> Self {
        Error::AssumptionViolation {
            assumption: "cross-team connectivity",
            detail: detail.into(),
        }
    }
}
