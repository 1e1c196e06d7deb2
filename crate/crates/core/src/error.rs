use thiserror::Error;

/// Errors raised by the grid toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid value {0}: samples must be non-negative or +inf")]
    InvalidValue(f64),
    #[error("0 * inf is undefined")]
    ZeroTimesInfinity,
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid lambda: {0}")]
    InvalidLambda(String),
    #[error("exponent {p} is below -1/{n}")]
    ExponentOutOfRange { p: String, n: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("axis {axis} out of range for dimension {dims}")]
    InvalidAxis { axis: usize, dims: usize },
    #[error("coordinate {coord} is not a node on axis {axis}")]
    OffGrid { axis: usize, coord: f64 },
    #[error("infinite sample where a finite function is required")]
    InfiniteSample,
    #[error("infinite integral")]
    InfiniteIntegral,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("hypothesis {name} not satisfied: residual {residual:e} exceeds {tol:e}")]
    HypothesisViolated { name: String, residual: f64, tol: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
