use thiserror::Error;

/// Errors raised by kernel evaluation, interpolation and greedy selection.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("point {index} has coordinate {value} outside the domain of the {kernel} kernel")]
    OutsideDomain {
        kernel: &'static str,
        index: usize,
        value: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("points {first} and {second} coincide")]
    DuplicatePoints { first: usize, second: usize },

    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("candidate {0} is already selected")]
    AlreadySelected(usize),

    #[error("candidate index {index} out of range ({len} candidates)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error(
        "numerical breakdown at candidate {index}: squared power {value:e} is below tolerance"
    )]
    NumericalBreakdown { index: usize, value: f64 },

    #[error("no admissible candidate left")]
    Exhausted,

    #[error("Cholesky factorization failed at pivot {pivot}")]
    Factorization { pivot: usize },

    #[error("{what} requires {required}, got {got}")]
    OutOfDomain {
        what: &'static str,
        required: &'static str,
        got: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
