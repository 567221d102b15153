use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("subsystem dimensions must all be at least 2, got {0:?}")]
    InvalidDims(Vec<usize>),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state has zero norm and cannot be normalized")]
    ZeroNorm,

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("invalid subsystem selection: {0}")]
    InvalidSelection(String),

    #[error("operation needs a bipartite state, got {0} subsystems")]
    NotBipartite(usize),

    #[error("operation needs a two-qubit state, got dims {0:?}")]
    NotTwoQubit(Vec<usize>),

    #[error("initial state is not a product state (subsystem {subsystem} purity {purity})")]
    NotProductState { subsystem: usize, purity: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Fock truncation leakage {leakage:e} exceeds bound {bound:e}")]
    Leakage { leakage: f64, bound: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
