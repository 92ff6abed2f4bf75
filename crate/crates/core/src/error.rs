use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("malformed value: {0}")]
    Structural(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible budgets: no choice of stage budgets satisfies {inequality}")]
    Infeasible { inequality: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(
        "not straight-line: `{keyword}` at line {line}; rewriting a loop or branch condition \
         in encrypted coordinates would reveal part of the inverse key map, so only \
         straight-line programs can be encrypted"
    )]
    NotStraightLine { line: usize, keyword: String },

    #[error("key fingerprint mismatch: expected {expected}, found {found}")]
    FingerprintMismatch { expected: String, found: String },

    #[error("scheme version mismatch: expected {expected}, found {found}")]
    VersionMismatch { expected: u8, found: u8 },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn dims(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Serialization(err.to_string())
    }
}
