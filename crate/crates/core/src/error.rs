use core::fmt;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two operands have incompatible dimensions.
    DimensionMismatch { expected: usize, got: usize },
    /// A parameter is outside its valid range.
    InvalidParameter(&'static str),
    /// A row or column index is out of range.
    IndexOutOfRange { index: usize, bound: usize },
    /// A structural precondition between inputs does not hold.
    Contract(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} out of range (bound {bound})")
            }
            Error::Contract(msg) => write!(f, "contract violation: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
