use crate::fabric::QubitAddr;

/// Errors raised by the simulator, the network fabric and the run pipeline.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("duplicate operand {0} on a two-qubit gate")]
    DuplicateOperand(usize),

    #[error("state must have between 1 and {max} qubits, got {got}")]
    InvalidQubitCount { got: usize, max: usize },

    #[error("amplitude vector length {0} is not a power of two")]
    InvalidLength(usize),

    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("corrupt state: both outcome probabilities of qubit {qubit} are below 1e-12")]
    CorruptState { qubit: usize },

    #[error("forced outcome {bit} on qubit {qubit} has zero probability")]
    ImpossibleOutcome { qubit: usize, bit: u8 },

    #[error("empty qubit list")]
    EmptyQubitList,

    #[error("shots must be at least 1")]
    ZeroShots,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("k exceeds n (k = {k}, n = {n})")]
    KExceedsN { n: usize, k: usize },

    #[error("node {node} out of range for {k} nodes")]
    NodeOutOfRange { node: usize, k: usize },

    #[error("address {0:?} does not exist in the partition")]
    InvalidAddress(QubitAddr),

    #[error("cross-node gate between {a:?} and {b:?}")]
    CrossNodeGate { a: QubitAddr, b: QubitAddr },

    #[error("communication slot of node {0} is busy")]
    CommSlotBusy(usize),

    #[error("fabric was built without communication qubits")]
    NoCommQubits,

    #[error("classical message from node {0} to itself")]
    SelfMessage(usize),

    #[error("expected classical message {src} -> {dst} was not delivered")]
    MessageMissing { src: usize, dst: usize },

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("theta must lie in [0, 1), got {0}")]
    InvalidTheta(f64),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("run exceeded its time limit")]
    Timeout,

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
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

pub type Result<T, E = Error> = std::result::Result<T, E>;
