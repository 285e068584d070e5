use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Geodesic balls of radius `rho >= pi` are not embedded.
    #[error("geodesic ball of radius {rho} does not exist: the radius must satisfy 0 <= rho < pi")]
    NotEmbedded { rho: f64 },

    /// An iterative solver failed to converge.
    #[error("numerical failure in {routine}: {detail}")]
    Numeric {
        routine: &'static str,
        detail: String,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
