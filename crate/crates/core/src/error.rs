use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A function was asked for a value where it is undefined (zero argument of a logarithm, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter lies outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The target point lies on a branch cut the construction excludes.
    #[error("branch error: {0}")]
    Branch(String),

    #[error("pole proximity: zeta = {zeta} lies within {distance:e} of an integer")]
    PoleProximity { zeta: Complex64, distance: f64 },

    /// The configuration cannot produce a convergent integral.
    #[error("non-convergent configuration: {0}")]
    Configuration(String),

    /// Quadrature did not reach the requested tolerance within its budget.
    #[error("accuracy error: best estimate {estimate} with error {error:e} exceeds tolerance {tolerance:e}")]
    Accuracy {
        estimate: Complex64,
        error: f64,
        tolerance: f64,
    },

    #[error("decay certificate violated: {0}")]
    Certificate(String),

    /// A function expression could not be evaluated at a point.
    #[error("evaluation failed at {at}: {reason}")]
    Evaluation { at: Complex64, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{at} lies outside the continuation domain C \\ [1, inf)")]
    OutsideDomain { at: Complex64 },

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid series specification: {0}")]
    Spec(String),
}

impl Error {
    pub(crate) fn eval(at: Complex64, reason: impl Into<String>) -> Self {
        Error::Evaluation {
            at,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
