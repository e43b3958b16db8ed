use thiserror::Error;

/// Errors raised by the arithmetic kernels, composition machinery and
/// basis conversions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid modulus {p}: {reason}")]
    InvalidModulus { p: u64, reason: String },

    #[error("product length {len} exceeds transform capacity {capacity}")]
    CapacityExceeded { len: usize, capacity: usize },

    #[error("precision {n} is not below the modulus {p}")]
    PrecisionExceedsModulus { n: usize, p: u64 },

    #[error("invalid operator parameter: {0}")]
    InvalidOperatorParam(String),

    #[error("domain violation at step {step}: {reason}")]
    DomainViolation { step: usize, reason: String },

    #[error("valuation of step {step} cannot be certified at precision {precision}")]
    AmbiguousValuation { step: usize, precision: usize },

    #[error("sequence output is not tangent to the identity")]
    NotTangentToIdentity,

    #[error("map is not invertible: {0}")]
    NotInvertible(String),

    #[error("spec violation: {0}")]
    SpecViolation(String),

    #[error("singular diagonal: coefficient {index} vanishes")]
    SingularDiagonal { index: usize },

    #[error("zero coefficient at index {index}")]
    ZeroCoefficient { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
