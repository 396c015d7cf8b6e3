use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e}, tolerance {tolerance:e})")]
    NoConvergence {
        iterations: u32,
        residual: f64,
        tolerance: f64,
    },

    /// Both flip rates are zero, so the chain has no unique stationary point.
    #[error("degenerate chain: both flip rates are zero")]
    DegenerateChain,
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
