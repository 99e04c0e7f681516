use alloc::string::String;

/// Errors raised by the construction and its checks.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty subset")]
    EmptySubset,
    #[error("empty family")]
    EmptyFamily,
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shrink exceeds Lebesgue number (s = {s}, L = {lebesgue})")]
    ShrinkExceedsLebesgue { s: f64, lebesgue: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("base sequence fails at level {level}: {quantity}")]
    BaseLevel { level: usize, quantity: String },
    #[error("sequence verification failed: {0}")]
    Verification(String),
    #[error("tree construction failed: {0}")]
    Tree(String),
    #[error("vertex {0} does not belong to this tree")]
    ForeignVertex(usize),
    #[error("point {0} is not a grid point")]
    NotInGrid(usize),
    #[error("radial check failed at point {point}, level {level}, i = {i}: best M = {best} (color {color})")]
    Radial {
        point: usize,
        level: usize,
        i: usize,
        best: usize,
        color: usize,
    },
    #[error("quasi-isometry fit failed: {0}")]
    Fit(String),
}

pub type Result<T> = core::result::Result<T, Error>;
