use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not special unitary (|det - 1| = {deviation:.3e})")]
    NotSpecialUnitary { deviation: f64 },

    #[error("state vector is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("register size {0} is outside the supported range")]
    UnsupportedQubitCount(usize),

    #[error("circuit has {0} ops, above the depth cap")]
    CircuitTooDeep(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("synthesis check failed: {0}")]
    Synthesis(String),
}
