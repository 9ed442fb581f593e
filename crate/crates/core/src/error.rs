use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("generator index {index} out of range for CR dimension m = {m}")]
    GeneratorIndex { index: usize, m: usize },

    #[error("CR dimension mismatch: expected m = {expected}, found m = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grade q = {q} out of range 0..={m}")]
    GradeOutOfRange { q: usize, m: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("{0} has no section space; spectral operations need a Heisenberg or torus-bundle model")]
    NoSectionSpace(&'static str),

    #[error("operator is not Hermitian (defect {defect:.3e}); wrap it as A*A first")]
    NotHermitian { defect: f64 },

    #[error("weight l = {ell} is not admissible for m = {m}: need l in {{-m, -m+2, ..., m}}")]
    WeightParity { ell: i64, m: usize },

    #[error("invalid conformal scale: {0}")]
    InvalidScale(String),

    #[error("missing model flags for circle-bundle clauses: {0}")]
    MissingFlags(String),

    #[error("entry (q = {q}) is a truncation lower bound only; refusing a verdict")]
    Uncertified { q: usize },

    #[error("sector {sector} is outside the assembled window")]
    SectorOutsideWindow { sector: i64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
