use thiserror::Error;

/// Errors raised by the numerical and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series expansion did not reach the requested tolerance.
    #[error("series did not converge after {terms} terms (partial value {partial})")]
    Convergence { partial: f64, terms: usize },

    /// Adaptive quadrature hit its subdivision limit before meeting tolerance.
    #[error("quadrature failed on [{lower}, {upper}]: estimate {estimate}, error {error_estimate}")]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        error_estimate: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
