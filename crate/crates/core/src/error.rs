use std::fmt;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two vectors (or a vector and a model) disagree on length.
    DimensionMismatch {
        /// Context for the mismatch (e.g. "adam_step aggregate").
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// A NaN or infinity appeared where a finite value is required.
    NonFinite {
        /// Operation or quantity that produced the value.
        context: &'static str,
    },
    /// A caller-supplied value violates an operation's contract.
    InvalidArgument(String),
    /// A text input (LIBSVM data, config) could not be parsed.
    Parse { line: usize, message: String },
    /// An experiment or algorithm configuration is invalid.
    Config(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "dimension mismatch in {what}: expected {expected}, got {got}"),
            Error::NonFinite { context } => {
                write!(f, "non-finite value in {context}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
