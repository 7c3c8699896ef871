use thiserror::Error;

/// Errors raised by the evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the hypothesis of the identity being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A partial numerator or denominator was negative, zero (denominators) or not finite.
    #[error("non-positive continued fraction element at index {index}: {value}")]
    NonPositiveElement { index: usize, value: f64 },

    /// Backward evaluation hit an exactly vanishing intermediate denominator.
    #[error("zero intermediate denominator at level {level}")]
    DivisionByZeroDenominator { level: usize },

    /// An equivalence-transform parameter was zero.
    #[error("equivalence transform parameter r_{index} is zero")]
    ZeroParameter { index: usize },

    /// An iterative routine ran out of terms before reaching its tolerance.
    #[error("no convergence after {terms} terms (last error estimate {estimate:e})")]
    NotConverged { terms: usize, estimate: f64 },

    /// A function that must be monotone was observed to grow.
    #[error("monotonicity violated at term {index}")]
    MonotonicityViolated { index: usize },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed: estimate {estimate} with error {error:e} after {panels} panels")]
    QuadratureFailure {
        estimate: f64,
        error: f64,
        panels: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
