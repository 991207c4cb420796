use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |H - H†| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi diagonalization did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("unknown mesostate label `{0}`")]
    UnknownLabel(String),
    #[error("state vector has zero norm")]
    ZeroVector,
    #[error("dephasing strength must be non-negative, got {0}")]
    NegativeGamma(f64),
    #[error("conditioning on a branch of probability {prob:e}")]
    ZeroProbabilityBranch { prob: f64 },
    #[error("{what} = {requested} exceeds the enumeration cap of {limit}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
    #[error("ring size must be even, got {0}")]
    OddN(usize),
    #[error("ring size {found} is below the minimum of {min}")]
    NTooSmall { found: usize, min: usize },
    #[error("label sets differ between distributions")]
    LabelMismatch,
    #[error("the two-preparation witness needs at least 5 sites, got {dim}")]
    PreparationUnavailable { dim: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
