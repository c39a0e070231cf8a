use thiserror::Error;

/// Errors raised by the Rademacher-space machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range for a space with {len} coordinates")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("success probability {value} at index {index} is not strictly inside (0, 1)")]
    InvalidProbability { index: usize, value: f64 },

    #[error("a Rademacher space needs at least one coordinate")]
    EmptySpace,

    #[error("configuration has {got} coordinates but the space has {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error(
        "exact enumeration refused: {m} coordinates exceed the cap of {cap}; \
         use Monte Carlo estimation instead"
    )]
    EnumerationCapExceeded { m: usize, cap: usize },

    #[error("kernel tuple {0:?} has a repeated index (kernels vanish on diagonals)")]
    DiagonalTuple(Vec<usize>),

    #[error("kernel of order {expected} given a tuple of length {got}")]
    KernelOrderMismatch { expected: usize, got: usize },

    #[error("L inverse requires centred functional (mean = {mean})")]
    NotCentred { mean: f64 },

    #[error("functional is not normalized: mean {mean}, second moment {second_moment}")]
    NotNormalized { mean: f64, second_moment: f64 },

    #[error("functional has zero variance and cannot be normalized")]
    DegenerateVariance,

    #[error("Monte Carlo mode requires gradient, second-gradient and interaction oracles")]
    MissingOracles,

    #[error("invalid Hölder triple ({r}, {s}, {t}): {reason}")]
    InvalidHolderTriple { r: f64, s: f64, t: f64, reason: String },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
