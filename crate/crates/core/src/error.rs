use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition of the named operation was violated.
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("quadrature did not converge on [{a}, {b}] (estimated error {err:e})")]
    Quadrature { a: f64, b: f64, err: f64 },

    #[error("NNLS failed on {failed} of {total} samples (limit 0.1%)")]
    Nnls { failed: u64, total: u64 },

    #[error("intrinsic-volume vector violates {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Domain { .. } | Error::InvalidCone(_))
    }
}
