use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain size {0} is out of the supported range")]
    DomainSize(usize),
    #[error("value {value} is outside the domain 0..{size}")]
    ValueOutOfDomain { value: usize, size: usize },
    #[error("arity mismatch: expected {expected}, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("domain mismatch: {0} vs {1}")]
    DomainMismatch(usize, usize),
    #[error("table of size {0} is too large")]
    TooLarge(u128),
    #[error("not a permutation of the domain")]
    NotAPermutation,
    #[error("the subset {0:?} is not preserved by the operation")]
    SubsetNotPreserved(Vec<u8>),
    #[error("unknown catalog key `{0}`")]
    UnknownKey(String),
    #[error("bad parameters for `{key}`: {reason}")]
    BadParams { key: String, reason: String },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("duplicate relation `{0}`")]
    DuplicateRelation(String),
    #[error("constant {0} used in a formula that does not allow constants")]
    ConstantNotAllowed(u8),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("limit exceeded: {0}")]
    Limit(String),
    #[error("{0}")]
    Invalid(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("corpus entry `{id}` ({anchor}): {source}")]
    Corpus {
        id: String,
        anchor: String,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
