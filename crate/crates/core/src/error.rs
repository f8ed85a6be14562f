use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {dim} exceeds the dense guard of {limit}")]
    DimensionOverflow { dim: u128, limit: u128 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Gram matrix is singular for k = {k}, d = {d} (need d >= 2k)")]
    SingularGram { k: usize, d: usize },

    #[error("invalid permutation: {0}")]
    InvalidPerm(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bad Pauli label {0:?}")]
    BadPauliLabel(String),

    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized (norm {norm})")]
    Unnormalized { norm: f64 },

    #[error("spectrum is not generic at order {order}: indices {witness:?}")]
    NonGeneric { order: usize, witness: Vec<usize> },

    #[error("combinatorial guard: order {order} at d = {d} is too large")]
    CombinatorialBlowup { order: usize, d: usize },

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("operators {a} and {b} overlap")]
    OverlappingOperators { a: String, b: String },

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
