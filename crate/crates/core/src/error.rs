use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector has no components")]
    EmptyVector,

    #[error("component {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    /// The zero vector has no normalized quantum state.
    #[error("degenerate input: the zero vector cannot be amplitude-encoded")]
    ZeroVector,

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("fidelity {fidelity} is unreachable for {qubits} qubits (must lie in (2^-{qubits}, 1])")]
    UnreachableFidelity { fidelity: f64, qubits: usize },

    #[error("no default state fidelity for a {0}-qubit resource state")]
    NoDefaultFidelity(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
