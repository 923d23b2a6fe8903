use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix does not preserve the intersection pairing")]
    NotSymplectic,

    #[error("surface mismatch: {0}")]
    SurfaceMismatch(String),

    #[error("invalid term: {0}")]
    InvalidTerm(String),

    #[error("rotation incompatible with target: {0}")]
    IncompatibleTarget(String),

    #[error("substitution mismatch at term {position}: {message}")]
    SubstitutionMismatch { position: usize, message: String },

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("internal consistency failure: substitution changed the product matrix")]
    ProductChanged,

    #[error("factorization is not homologically trivial")]
    NotTrivial,

    #[error("{0} requires integer coefficients; this factorization carries Z2 classes only")]
    RequiresIntegerCoefficients(&'static str),

    #[error("{0} requires a closed surface; cap boundaries first")]
    RequiresClosedSurface(&'static str),

    #[error("not a pencil factorization: {0}")]
    NotPencil(String),

    #[error("solution space of dimension {dim} exceeds the enumeration cap 2^{cap_log2}")]
    CapExceeded { dim: usize, cap_log2: usize },

    #[error("unknown relation: {0}")]
    UnknownRelation(String),

    #[error("unknown fixture: {0}")]
    UnknownFixture(String),

    #[error("fixture data error: {0}")]
    FixtureData(String),

    #[error("relation template {0} carries no signature value")]
    NoLedgerValue(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
