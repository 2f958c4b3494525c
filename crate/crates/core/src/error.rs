use thiserror::Error;

/// Errors produced anywhere in the engine.
///
/// The variants are grouped by the process exit code they map to, see
/// [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed scalar `{text}`: {reason}")]
    MalformedScalar { text: String, reason: String },

    #[error("mixed radicands: sqrt({found}) used in a context with radicand {expected}")]
    MixedRadicand { expected: u64, found: u64 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("degenerate metric (determinant is zero)")]
    DegenerateMetric,

    #[error("not a G2* 3-form: {0}")]
    NotG2Form(String),

    #[error("calibration needs a {root}-th root of {value}, which is not representable exactly")]
    UnrepresentableCalibration { root: u32, value: String },

    #[error("xi must satisfy g43(xi, xi) = -1, got {norm}")]
    NonTimelikeUnit { norm: String },

    #[error("arity mismatch: expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("basis index {0} out of range 1..=7")]
    IndexOutOfRange(usize),

    #[error("Jacobi identity fails for (f{}, f{}, f{}): residual {residual}", .triple.0, .triple.1, .triple.2)]
    Jacobi {
        triple: (usize, usize, usize),
        residual: String,
    },

    #[error("invalid problem file at {location}: {reason}")]
    Validation { location: String, reason: String },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("deduction chain `{scenario}` broken at step {step}: {reason}")]
    ChainBroken {
        scenario: String,
        step: usize,
        reason: String,
    },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}

impl Error {
    pub(crate) fn validation(location: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            location: location.into(),
            reason: reason.into(),
        }
    }

    /// Process exit status for the CLI: 1 validation, 2 internal consistency,
    /// 3 broken deduction chain.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inconsistent(_) => 2,
            Error::ChainBroken { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
