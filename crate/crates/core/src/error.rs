//! Error types shared across the kernel.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QcvError {
    /// Evaluation point is a zero of the (cancelled) denominator.
    #[error("pole: denominator vanishes at the evaluation point")]
    Pole,

    /// Two elements over different torus or series contexts were combined.
    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    /// A substitution map does not reproduce the source commutation phases.
    #[error("skew-incompatible substitution on pair ({var_a}, {var_b}): expected q^{expected}, images give q^{found}")]
    SkewIncompatible {
        var_a: String,
        var_b: String,
        expected: i64,
        found: i64,
    },

    /// A substitution would need a fractional exponent or coefficient root
    /// that does not exist in the coefficient field.
    #[error("substitution of {variable} requires a non-integral power")]
    NonIntegralSubstitution { variable: String },

    /// Series inversion requires a single invertible monomial in degree zero.
    #[error("not invertible: degree-zero part is not a single monomial unit")]
    NotInvertible,

    /// q-exponential of a series with a degree-zero component never terminates.
    #[error("q-exponential argument has a degree-zero component")]
    NonNilpotentArgument,

    /// Matrix q-exponential of a non-nilpotent matrix over an untruncated ring.
    #[error("matrix is not nilpotent within {max_terms} powers")]
    NotNilpotent { max_terms: usize },

    /// Constructed generator matrices violate the algebra relations.
    #[error("generator relation check failed: {0}")]
    RelationCheckFailed(String),

    /// Block index outside 1..=n(n+1)/2.
    #[error("block index {index} out of range 1..={max} for rank {rank}")]
    IndexOutOfRange { index: usize, max: usize, rank: usize },

    /// Numeric partial sums failed to stabilize.
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    /// Integer fast-path coefficient overflow (falls back to big integers).
    #[error("integer coefficient overflow in fast path")]
    CoefficientOverflow,
}

pub type Result<T> = std::result::Result<T, QcvError>;
