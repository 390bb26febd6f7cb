use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("quadrature failure: estimates {previous:e} and {last:e} did not agree")]
    QuadratureFailure { previous: f64, last: f64 },

    /// The integrand is not integrable near a declared singular point.
    #[error("infinite modular (non-integrable singularity)")]
    InfiniteModular,

    #[error("function is not in the space: modular is infinite for every scale")]
    NotInSpace,

    #[error("non-finite integrand value at {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("unbounded conjugate exponent: {0}")]
    UnboundedConjugate(String),

    #[error("no certificate: {0}")]
    NoCertificate(String),

    #[error("no ellipsoid within sqrt(d): factor {factor} at direction {worst_direction:?}")]
    NoEllipsoid {
        factor: f64,
        worst_direction: Vec<f64>,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for the errors that mean "this quantity is infinite".
    pub fn is_divergence(&self) -> bool {
        matches!(self, Error::InfiniteModular | Error::NotInSpace)
    }
}
