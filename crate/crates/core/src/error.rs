use thiserror::Error;

/// Errors raised by the library.
///
/// `InvariantViolation` is special: it signals that one of the verified
/// mathematical statements failed on a concrete input. It is never the
/// caller's fault and the CLI maps it to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("atom ids must be positive integers, got {0}")]
    InvalidAtom(u128),

    #[error("index sets must be nonempty")]
    EmptyIndexSet,

    #[error("{what} = {value} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("atom overflow: {0}")]
    Overflow(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{field}: {message}")]
    Parse { field: String, message: String },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
