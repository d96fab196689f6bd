//! Library error type.

/// Errors reported by the library.
///
/// Every public operation that can reject its input returns `Result<_, Error>`;
/// operations whose contracts admit no failure return plain values.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// Coordinate indices are 1-based; 0 is not a valid index.
    #[error("coordinate index must be >= 1")]
    ZeroIndex,

    /// Coefficients must be finite (no NaN or infinity).
    #[error("coefficient for index {index} must be finite, got {value}")]
    NonFiniteCoefficient { index: u32, value: f64 },

    /// A serialized vector listed the same index twice.
    #[error("duplicate coordinate index {0}")]
    DuplicateIndex(u32),

    /// A serialized index did not parse as a positive integer.
    #[error("malformed coordinate index {0:?}")]
    MalformedIndex(String),

    /// Bump index outside the exactly-evaluable range.
    #[error("bump index {n} outside supported range 1..={max}")]
    BumpIndexRange { n: u32, max: u32 },

    /// The bump argument must be a finite nonnegative real.
    #[error("bump argument must be finite and >= 0, got {0}")]
    NegativeBumpArgument(f64),

    /// The bump argument must be a finite positive real.
    #[error("argument must be finite and > 0, got {0}")]
    NonPositiveArgument(f64),

    /// The argument is so small that the active window leaves the supported
    /// bump index range; evaluating there would silently lose exactness.
    #[error("argument {0} is below the exactly-evaluable range")]
    ArgumentUnderflow(f64),

    /// The perturbation strength exceeds the admissible band.
    #[error("|alpha| = {0} exceeds the admissible bound 2/sqrt(17)")]
    AlphaOutOfRange(f64),

    /// Graph scaling parameter must be a positive real.
    #[error("scale m must be finite and > 0, got {0}")]
    NonPositiveScale(f64),

    /// Linear coefficient must be a nonnegative real (monotonicity).
    #[error("lambda must be finite and >= 0, got {0}")]
    NegativeLambda(f64),

    /// Pointwise evaluation requested for a set-valued operator.
    #[error("operator {0} is set-valued at some points; evaluate through its resolvent")]
    SetValuedEval(&'static str),

    /// No resolvent procedure is available for this operator.
    #[error("operator {0} has no supported resolvent procedure")]
    NoResolventProcedure(&'static str),

    /// Difference quotients need two distinct points.
    #[error("quotient requires distinct points")]
    IdenticalPoints,

    /// Probe directions must be nonzero.
    #[error("direction must be nonzero")]
    ZeroDirection,

    /// Solver tolerance must be a positive finite real.
    #[error("tolerance must be finite and > 0, got {0}")]
    BadTolerance(f64),

    /// Fixed-point iteration failed to reach the tolerance within the cap.
    #[error("contraction did not reach tolerance within {0} iterations")]
    IterationCapExceeded(usize),

    /// The supplied base value does not lie on the operator graph.
    #[error("base value is off the operator graph (distance {0})")]
    OffGraphBasePoint(f64),

    /// Scale grids must be given in strictly increasing order.
    #[error("scale list must be strictly increasing and positive")]
    BadScaleList,

    /// Dyadic scale ranges must satisfy k_min <= k_max.
    #[error("scale range must satisfy k_min <= k_max")]
    EmptyScaleRange,
}
