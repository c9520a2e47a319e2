use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Dicke spec: k = {k} exceeds n = {n}")]
    InvalidSpec { n: usize, k: usize },

    #[error("at least one qubit is required")]
    NoQubits,

    #[error("{n} qubits exceeds the statevector cap of {cap}")]
    Capacity { n: usize, cap: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("partial trace needs two distinct qubits, got {0} twice")]
    EqualQubits(usize),

    #[error("amplitude vector has length {len}, expected a power of two")]
    MalformedState { len: usize },

    #[error("post-measurement norm {0:e} is degenerate")]
    DegenerateNorm(f64),

    #[error("conditioning on an outcome with probability {0:e}")]
    ZeroProbability(f64),

    #[error("malformed density matrix: {0}")]
    MalformedMatrix(String),

    #[error("n = {0} is below the two-party minimum")]
    TooFewParties(usize),

    #[error("zero amplitude: k = {k} with n = {n} carries no skew information")]
    ZeroAmplitude { n: usize, k: usize },

    #[error("no counted rounds for party {0}")]
    EmptyTally(usize),

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
