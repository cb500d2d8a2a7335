use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("matrix order must be at least 1")]
    EmptyMatrix,

    #[error("matrix is not square: row {row} has {len} entries, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },

    #[error("polynomial needs at least one coefficient")]
    EmptyPolynomial,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumerating {requested} paths exceeds the cap of {cap} (raise it with --cap)")]
    CapExceeded { requested: u128, cap: u128 },

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("matrix has a negative entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },

    #[error("path has no repeated vertex")]
    NoCycle,

    #[error("cycle length {got} is not the minimal cycle length {expected}")]
    WrongCycleLength { got: usize, expected: usize },

    #[error("cycle at offset {start} of length {length} is not the first minimal cycle of the path")]
    InvalidCycle { start: usize, length: usize },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
