use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// The input violates an invariant of its type.
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    /// Zero volume, zero moment or a collapsed simplex.
    #[error("degenerate shape: {0}")]
    Degenerate(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A formula valid only in the arc-length parametrization was applied to
    /// a curve whose squared speed is not constant.
    #[error("constant-speed parametrization required: residual {residual:.3e} exceeds {tolerance:.1e}")]
    ConstantSpeedRequired { residual: f64, tolerance: f64 },

    /// The shape does not satisfy the hypothesis of the requested theorem.
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("{what} did not converge (achieved {achieved:.3e})")]
    NotConverged { what: String, achieved: f64 },

    #[error("{what} is ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { what: String, condition: f64 },
}
