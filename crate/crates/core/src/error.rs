use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain (bad index, shape,
    /// non-Hermitian input, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size error: {0}")]
    Size(String),

    /// A computed quantity violated an invariant it must satisfy.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("stationary state not reached by t = {horizon}: residual {residual:e}")]
    NotConverged {
        horizon: f64,
        residual: f64,
        state: Box<crate::linalg::DensityMatrix>,
    },

    #[error("unsupported graph: {0}")]
    UnsupportedGraph(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
