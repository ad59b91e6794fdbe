use thiserror::Error;

/// Errors raised by the closed-form and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a function (pole, negative argument, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The input is well defined mathematically but not supported here.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A lower hypergeometric parameter hits a pole before the series terminates.
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),

    /// Two exp-polynomials built over different `q`.
    #[error("mismatched substitution parameter: {left} vs {right}")]
    MismatchedQ { left: f64, right: f64 },

    /// Exact division left a remainder; a closed-form identity has been violated.
    #[error("inexact division: remainder {remainder:e} exceeds {bound:e}")]
    InexactDivision { remainder: f64, bound: f64 },

    /// Requested bound state does not exist for the given parameters.
    #[error("no such state: {0}")]
    NoSuchState(String),

    /// Two constructions that must agree do not.
    #[error("theory violation: {0}")]
    TheoryViolation(String),

    /// Darboux seed has a node inside the domain.
    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    /// Parameter values violate the basic constraints (q > 0, v > 0, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Exp-polynomial cannot represent the requested state; `formula` carries
    /// the closed form as text.
    #[error("unsupported representation: {formula}")]
    UnsupportedRepresentation { formula: String },

    /// Adaptive quadrature ran out of depth.
    #[error("quadrature did not converge (best estimate {estimate:e}, error estimate {error:e})")]
    ConvergenceFailure { estimate: f64, error: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
