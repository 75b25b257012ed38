use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("register width mismatch: expected {expected} qubits, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("{width} qubits exceeds the {cap}-qubit limit of {what}")]
    WidthCap {
        what: &'static str,
        width: usize,
        cap: usize,
    },

    #[error("qubit index {index} out of range for a {width}-qubit register")]
    QubitIndex { index: usize, width: usize },

    #[error("qubit {0} appears more than once among control and target indices")]
    OverlappingQubits(usize),

    #[error("vanishing overlap with the reference state (probability {prob:e} < {threshold:e})")]
    VanishingOverlap { prob: f64, threshold: f64 },

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("amplitude vector of length {0} is not a power of two")]
    BadLength(usize),

    #[error("invalid Pauli axes string {axes:?}: {reason}")]
    InvalidAxes { axes: String, reason: String },

    #[error("operator is not Hermitian: {0}")]
    NonHermitian(String),

    #[error("empty operator: {0}")]
    EmptyOperator(&'static str),

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("empty trace")]
    EmptyTrace,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the CLI; one per failure class.
    pub fn code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidAxes { .. } | Error::Json(_) => 2,
            Error::WidthMismatch { .. }
            | Error::WidthCap { .. }
            | Error::QubitIndex { .. }
            | Error::OverlappingQubits(_)
            | Error::BadLength(_) => 3,
            Error::VanishingOverlap { .. } => 4,
            Error::NotNormalized(_)
            | Error::NonHermitian(_)
            | Error::EmptyOperator(_)
            | Error::InvalidPulse(_)
            | Error::InvalidParameter { .. } => 5,
            Error::EmptyTrace | Error::Io(_) | Error::Csv(_) => 6,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::WidthMismatch { .. } => "width_mismatch",
            Error::WidthCap { .. } => "width_cap",
            Error::QubitIndex { .. } => "qubit_index",
            Error::OverlappingQubits(_) => "overlapping_qubits",
            Error::VanishingOverlap { .. } => "vanishing_overlap",
            Error::NotNormalized(_) => "not_normalized",
            Error::BadLength(_) => "bad_length",
            Error::InvalidAxes { .. } => "invalid_axes",
            Error::NonHermitian(_) => "non_hermitian",
            Error::EmptyOperator(_) => "empty_operator",
            Error::InvalidPulse(_) => "invalid_pulse",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Config { .. } => "config",
            Error::EmptyTrace => "empty_trace",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
