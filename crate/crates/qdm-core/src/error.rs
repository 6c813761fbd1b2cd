use thiserror::Error;

/// Every failure the library can report, grouped so that the CLI and the C
/// ABI can map each one to a stable numeric class.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QdmError {
    #[error("generator map is not a permutation of 0..{matter_dim}: {detail}")]
    InvalidPermutation { matter_dim: usize, detail: String },

    #[error("generator map raised to the power {order} is not the identity")]
    OrderViolation { order: usize },

    #[error("group order must be at least 1")]
    EmptyGroup,

    #[error("digit {value} out of range for radix {radix} at position {position}")]
    RadixViolation { position: usize, value: usize, radix: usize },

    #[error("state dimension {requested} exceeds the cap {cap}")]
    DimensionCap { requested: u128, cap: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid cell reference: {0}")]
    InvalidCell(String),

    #[error("trace {trace} is not within 1e-6 of an integer")]
    NonIntegerTrace { trace: f64 },

    #[error("projected seed for representative {representative} is the zero vector")]
    AnnihilatedSeed { representative: usize },

    #[error("iterative eigensolver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("path unavailable: {0}")]
    PathUnavailable(String),

    #[error("W operator annihilates the source vacuum")]
    ZeroResult,

    #[error("products not in the span of the family: {}", format_pairs(.pairs))]
    NotClosed { pairs: Vec<(String, String)> },

    #[error("non-integer fusion coefficients for: {}", format_pairs(.pairs))]
    NonIntegerCoefficients { pairs: Vec<(String, String)> },

    #[error("no element of the family acts as a two-sided identity")]
    MissingVacuum,

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

fn format_pairs(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(a, b)| format!("({a},{b})")).collect::<Vec<_>>().join(" ")
}

/// Coarse failure classes. The discriminants are the CLI exit codes and the
/// C ABI status codes.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config = 2,
    DimensionCap = 3,
    Internal = 4,
    Fusion = 5,
    PathUnavailable = 6,
}

impl QdmError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        QdmError::Config { field: field.into(), message: message.into() }
    }

    pub fn class(&self) -> ErrorClass {
        use QdmError::*;
        match self {
            InvalidPermutation { .. }
            | OrderViolation { .. }
            | EmptyGroup
            | RadixViolation { .. }
            | InvalidCell(_)
            | InvalidPath(_)
            | MissingVacuum
            | Config { .. } => ErrorClass::Config,
            DimensionCap { .. } => ErrorClass::DimensionCap,
            NonIntegerTrace { .. }
            | DimensionMismatch { .. }
            | AnnihilatedSeed { .. }
            | ConvergenceFailure(_)
            | ZeroResult
            | Invariant(_) => ErrorClass::Internal,
            NotClosed { .. } | NonIntegerCoefficients { .. } => ErrorClass::Fusion,
            PathUnavailable(_) => ErrorClass::PathUnavailable,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class() as i32
    }
}

pub type Result<T> = std::result::Result<T, QdmError>;
