use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot allocate {requested} qubits (supported range is 1..={max})")]
    Capacity { requested: usize, max: usize },

    #[error("qubit {index} is out of range for a {width}-qubit register file")]
    QubitOutOfRange { index: usize, width: usize },

    #[error("qubit {0} appears more than once in a gate or builder argument")]
    DuplicateQubit(usize),

    #[error("width mismatch: {what} ({left} vs {right})")]
    WidthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("register `{0}` is empty")]
    EmptyRegister(String),

    #[error("qubit {qubit} overlaps register `{register}`")]
    Overlap { qubit: usize, register: String },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("malformed PGM: {0}")]
    Pgm(String),

    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),

    #[error("value {value} does not fit in {width} bits")]
    ValueRange { value: u64, width: usize },

    #[error("qubit budget exceeded: image needs {required} qubits, simulator cap is {max}")]
    Budget { required: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
