use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Micro step not strictly inside the macro step.
    DegenerateSteps {
        micro: f64,
        macro_step: f64,
    },
    /// A domain length is not an integral multiple of its step.
    NonDivisible {
        quantity: &'static str,
        ratio: f64,
    },
    /// A parameter failed its precondition.
    InvalidParameter(&'static str),
    /// A state entry became NaN/Inf or exceeded the blow-up guard.
    NonFinite {
        time: f64,
    },
    /// Two fields cannot be compared on a common mesh.
    MeshMismatch(&'static str),
    EmptyVector,
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// A field from an unstable run was passed where a complete one is required.
    IncompleteField {
        failure_time: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateSteps { micro, macro_step } => {
                write!(f, "degenerate steps: micro step {micro} must be strictly smaller than macro step {macro_step}")
            }
            Error::NonDivisible { quantity, ratio } => {
                write!(f, "{quantity} is not integral (ratio {ratio})")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NonFinite { time } => write!(f, "integration became non-finite at t = {time}"),
            Error::MeshMismatch(msg) => write!(f, "mesh mismatch: {msg}"),
            Error::EmptyVector => f.write_str("empty vector"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::IncompleteField { failure_time } => {
                write!(f, "field is incomplete: run went unstable at t = {failure_time}")
            }
        }
    }
}

impl core::error::Error for Error {}
