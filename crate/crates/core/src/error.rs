use thiserror::Error;

/// Errors raised by the model-level algebra.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("arity mismatch: expected {expected} factors, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("functionals of mixed kinds cannot be combined ({0})")]
    MixedKinds(&'static str),

    #[error("operator `{name}` is not Hermitian (max asymmetry {max_asymmetry:e})")]
    NotHermitian { name: String, max_asymmetry: f64 },

    #[error("permutation group S_{0} is outside the supported range 1..=8")]
    GroupOutOfRange(usize),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("operators do not commute: ||[A,B]||_max = {norm:e} exceeds {tol:e}")]
    NonCommuting { norm: f64, tol: f64 },

    #[error("factor observables differ: {0}")]
    UnequalFactors(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;
