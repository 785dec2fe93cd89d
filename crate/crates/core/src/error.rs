use thiserror::Error;

/// Errors produced by the approximation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid space specification: {0}")]
    InvalidSpace(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("index {index} out of range (max {max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("point with modulus {modulus} lies outside the allowed region (bound {bound})")]
    OutOfDomain { modulus: f64, bound: f64 },

    #[error("kernel derivative order {order} exceeds the limit {limit}")]
    OrderTooHigh { order: usize, limit: usize },

    #[error("kernel has zero or non-finite norm")]
    ZeroNorm,

    #[error("degenerate system at element {index}: normalization denominator {denominator:e}")]
    DegenerateSystem { index: usize, denominator: f64 },

    #[error("degenerate parameter tuple: {0}")]
    DegenerateTuple(String),

    #[error("selection grid is empty")]
    EmptyGrid,

    #[error("evaluation budget exceeded: {required} > {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("operation requires the Hardy space")]
    NotHardy,

    #[error("target function is zero")]
    ZeroTarget,
}

pub type Result<T> = std::result::Result<T, Error>;
