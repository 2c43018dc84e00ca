use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid schedule: step {k} exceeds total steps {total}")]
    InvalidSchedule { k: usize, total: usize },

    #[error("register of {n} qubits exceeds the limit of {limit}")]
    SizeLimit { n: usize, limit: usize },

    #[error("qubit index {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("qubit count mismatch: expected {expected}, got {got}")]
    QubitMismatch { expected: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (residual {0:e})")]
    NotSymmetric(f64),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("generator filter exhausted after {attempts} attempts: {reason}")]
    FilterExhausted { attempts: usize, reason: String },

    #[error("instance file not found: {0}")]
    InstanceNotFound(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag, used by the command-line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSize(_) => "invalid-size",
            Error::InvalidInstance(_) => "invalid-instance",
            Error::InvalidSchedule { .. } => "invalid-schedule",
            Error::SizeLimit { .. } => "size-limit",
            Error::QubitOutOfRange { .. } => "qubit-out-of-range",
            Error::InvalidGate(_) => "invalid-gate",
            Error::QubitMismatch { .. } => "qubit-mismatch",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::NotSymmetric(_) => "not-symmetric",
            Error::UndefinedMetric(_) => "undefined-metric",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::FilterExhausted { .. } => "filter-exhausted",
            Error::InstanceNotFound(_) => "instance-not-found",
            Error::Parse(_) => "parse-error",
            Error::Io(_) => "io-error",
            Error::Json(_) => "json-error",
        }
    }
}
