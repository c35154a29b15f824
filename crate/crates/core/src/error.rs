use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error in {function}: {message}")]
    Domain {
        function: &'static str,
        message: String,
    },

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (partial value {value:e}, error estimate {error_estimate:e})"
    )]
    NoConvergence {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("infeasible operating point: {0}")]
    Infeasible(String),

    #[error("estimate undefined: all {trials} trials were singular")]
    AllSingular { trials: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, message: impl Into<String>) -> Error {
    Error::Domain {
        function,
        message: message.into(),
    }
}
