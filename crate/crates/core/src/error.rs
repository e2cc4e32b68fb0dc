use thiserror::Error;

/// Errors produced by the extension pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An input vector does not have the length the operation requires.
    #[error("length mismatch for {what}: expected {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    /// Input data contained NaN or an infinity.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// An iterative numerical kernel failed to converge, or produced garbage.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An operator cache file is malformed or fails validation.
    #[error("operator cache: {0}")]
    Cache(String),

    #[error("operator cache: format version {found}, this build reads {expected}")]
    CacheVersion { found: u32, expected: u32 },

    #[error("operator cache: checksum mismatch")]
    CacheChecksum,

    /// The cache holds an operator for a different configuration.
    #[error("operator cache: `{field}` is {stored} in the file but {requested} was requested")]
    CacheConfigMismatch {
        field: &'static str,
        stored: String,
        requested: String,
    },

    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
        if expected == actual {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                what,
                expected,
                actual,
            })
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
