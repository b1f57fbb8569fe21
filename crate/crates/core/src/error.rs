//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("register size {0} is out of the supported range 1..=20")]
    QubitCountOutOfRange(usize),

    #[error("qubit index {index} is out of range for a {num_qubits}-qubit register")]
    QubitIndexOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit indices must be distinct, {0} appears twice")]
    DuplicateQubit(usize),

    #[error("amplitude vector length {0} is not a power of two between 2 and 2^20")]
    BadAmplitudeCount(usize),

    #[error("state vector is not normalized: |norm - 1| = {0:.3e}")]
    NotNormalized(f64),

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("matrix is not unitary: max |M\u{2020}M - I| = {0:.3e}")]
    NotUnitary(f64),

    #[error("matrix dimension {0} is not a power of two qubit dimension")]
    BadGateDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid bipartition: {0}")]
    InvalidPartition(String),

    #[error("state is not envariant under the given unitary: condition residual {residual:.3e}")]
    NotEnvariant { residual: f64 },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("unknown experiment '{0}'")]
    UnknownExperiment(String),

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("probability {value} for {name} is outside [0, 1]")]
    BadProbability { name: &'static str, value: f64 },

    #[error("invalid distribution: {0}")]
    BadDistribution(String),

    #[error("invalid density matrix: {0}")]
    BadDensityMatrix(String),

    #[error("display order is not a permutation of the register qubits")]
    BadDisplayOrder,
}

impl Error {
    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }
}
