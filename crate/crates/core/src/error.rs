use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("budget exceeded: {what} needs {requested}, limit is {limit}")]
    Budget {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("construction inapplicable: {0}")]
    Inapplicable(String),

    #[error("cannot parse {0:?}")]
    Parse(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn parse(s: &str) -> Self {
        Error::Parse(s.to_string())
    }

    pub(crate) fn dims(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
