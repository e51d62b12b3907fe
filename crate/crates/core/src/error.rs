use thiserror::Error;

/// Errors raised by the simulation, loss, and optimization routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HebmError {
    #[error("invalid Pauli label {label:?}: {reason}")]
    InvalidPauli { label: String, reason: String },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("basis index {index} out of range for {n_qubits} qubits")]
    BasisIndexOutOfRange { index: usize, n_qubits: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ansatz needs at least {min} qubits, got {found}")]
    TooFewQubits { min: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("state norm drifted to {norm} (tolerance {tolerance})")]
    NormDrift { norm: f64, tolerance: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("noise angle {angle_deg} deg outside the admissible range {limit_deg} deg")]
    NoiseAngleOutOfRange { angle_deg: f64, limit_deg: f64 },

    #[error("negative jump rate {0}")]
    NegativeRate(f64),

    #[error("density matrix invariant violated: {0}")]
    DensityInvariant(String),

    #[error("non-finite loss at parameters {0:?}")]
    NonFiniteLoss(Vec<f64>),

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("{0} is not supported")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, HebmError>;
