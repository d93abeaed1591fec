use thiserror::Error;

/// Errors produced by the distance library.
#[derive(Debug, Error)]
pub enum QibdError {
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("control qubit {0} overlaps the data register")]
    OverlappingRegisters(usize),

    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("invalid state: squared norm is {0}")]
    InvalidNorm(f64),

    #[error("coefficient {0} outside [0, 1]")]
    CoefficientOutOfRange(f64),

    #[error("duplicate coupling between qubits {0} and {1}")]
    DuplicateCoupling(usize, usize),

    #[error("shot count must be positive")]
    ZeroShots,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QibdError>;
