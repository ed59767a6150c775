use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A text input (profile file, weight file, assignment file, bench
    /// config) could not be parsed. Carries the 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Input parsed but violates a structural requirement (duplicate
    /// alternative in a ranking, index out of range, ...).
    #[error("invalid input: {0}")]
    Validation(String),

    /// Input uses a feature this crate does not support (ties in
    /// rankings, SOI profiles where complete rankings are required).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An argument is outside an operation's domain (empty remaining
    /// set, self-edge induced weight, cyclic base graph, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured resource cap was exceeded (oracle size cap,
    /// solver alternative limit).
    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    /// Scorer weight file does not match the profile it is applied to.
    #[error("scorer mismatch: {0}")]
    ScorerMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
