use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value {0} cannot be discretized")]
    NonFinite(f64),

    #[error("weight vector has {got} entries, network expects {expected}")]
    WeightCount { expected: usize, got: usize },

    #[error("network is in {actual} mode, operation needs {required} mode")]
    WrongMode {
        required: &'static str,
        actual: &'static str,
    },

    #[error("invalid network configuration: {0}")]
    InvalidNetwork(String),

    #[error("batch is empty")]
    EmptyBatch,

    #[error("prediction/target length mismatch ({preds} vs {targets})")]
    LengthMismatch { preds: usize, targets: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit {0} appears more than once among targets and controls")]
    OverlappingQubits(usize),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("bitstring {bits:?} does not describe {num_qubits} qubits")]
    BadBitstring { bits: String, num_qubits: usize },

    #[error("{requested} qubits exceed the {limit}-qubit limit of this backend")]
    TooManyQubits { requested: usize, limit: usize },

    #[error("{0} is not an integer multiple of pi/2^{1}")]
    NotRepresentable(f64, u32),

    #[error("invalid circuit parameters: {0}")]
    InvalidCircuit(String),

    #[error("ancilla register not clean: {0}")]
    DirtyAncilla(String),

    #[error("{weights} weights exceed the exhaustive-search limit of {limit}")]
    SearchTooLarge { weights: usize, limit: usize },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
