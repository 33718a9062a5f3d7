use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPositive { min_eig: f64 },

    #[error("vector is not unit length (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("input {index} is not a projection (residual {residual:.3e})")]
    NotAProjection { index: usize, residual: f64 },

    #[error("functional is not a state: {0}")]
    NotAState(StateRejection),

    #[error("images do not define a *-homomorphism: {law} violated (residual {residual:.3e})")]
    NotAHomomorphism { law: String, residual: f64 },

    #[error("sample lies outside the algebra span (projection residual {residual:.3e})")]
    OutsideSpan { residual: f64 },

    #[error("purity is only defined on the full matrix algebra here")]
    NotFullAlgebra,

    #[error("phase-space grid is empty")]
    EmptyGrid,

    #[error("phase-space coordinate length {found} does not match {expected} (2 per mode)")]
    BadPhasePoint { expected: usize, found: usize },

    #[error("eigenvalue sequence increases at index {index}: {prev} < {next}")]
    MonotonicityViolation { index: u64, prev: f64, next: f64 },

    #[error("series has {got} samples, need at least {needed}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("decomposition weights sum to {sum}, expected 1")]
    UnnormalizedWeights { sum: f64 },

    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Why a functional failed the state test, with the offending magnitude.
#[derive(Debug, Clone, serde::Serialize)]
pub enum StateRejection {
    Positivity { min_gram_eig: f64 },
    Normalization { residual: f64 },
}

impl std::fmt::Display for StateRejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateRejection::Positivity { min_gram_eig } => {
                write!(f, "Gram matrix not PSD (min eigenvalue {min_gram_eig:.3e})")
            }
            StateRejection::Normalization { residual } => {
                write!(f, "not normalized (|f(1) - 1| = {residual:.3e})")
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
