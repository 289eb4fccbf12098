use thiserror::Error;

/// Errors raised by map construction, the positivity checks and the
/// classical/quantum bridges.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("map is not completely positive (Choi eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("map is not Hermiticity-preserving")]
    NotHermitianPreserving,

    #[error("map is not trace-preserving")]
    NotTracePreserving,

    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("state is not pure")]
    NotPure,

    #[error("vector is not in the probability simplex: {0}")]
    NotInSimplex(String),

    #[error("matrix is not column-stochastic: {0}")]
    NotColumnStochastic(String),

    #[error("negative transition rate {rate} at ({row}, {col})")]
    NegativeRate { row: usize, col: usize, rate: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("kind mismatch: {0}")]
    KindMismatch(String),

    #[error("step map failed validation: {0}")]
    InvalidStepMap(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
