use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = QdtError> = core::result::Result<T, E>;

/// Errors raised by the decision calculus.
#[derive(Debug, Clone, PartialEq)]
pub enum QdtError {
    /// Structurally impossible input, with a path to the offending field.
    InvalidScenario { path: String, message: String },
    /// A prospect carries amplitude outside its declared mode product.
    SupportViolation { prospect: String, message: String },
    /// A multi-index or basis index out of range.
    Index(String),
    /// Operand dimensions disagree.
    Dimension { expected: usize, found: usize },
    /// Attempt to normalize the zero vector.
    ZeroNorm,
    /// Normalization conditions violated beyond tolerance.
    Normalization {
        tolerance: f64,
        residuals: Vec<(String, f64)>,
    },
    /// A quantity that is analytically exact came out wrong numerically.
    Numerical(String),
    /// A prospect was referenced that has not been evaluated.
    State(String),
}

impl QdtError {
    pub fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        QdtError::InvalidScenario {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Short stable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            QdtError::InvalidScenario { .. } => "InvalidScenario",
            QdtError::SupportViolation { .. } => "SupportViolation",
            QdtError::Index(_) => "IndexError",
            QdtError::Dimension { .. } => "DimensionError",
            QdtError::ZeroNorm => "ZeroNormError",
            QdtError::Normalization { .. } => "NormalizationError",
            QdtError::Numerical(_) => "NumericalError",
            QdtError::State(_) => "StateError",
        }
    }
}

impl fmt::Display for QdtError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QdtError::InvalidScenario { path, message } => {
                write!(f, "invalid scenario at `{path}`: {message}")
            }
            QdtError::SupportViolation { prospect, message } => {
                write!(f, "support violation in prospect `{prospect}`: {message}")
            }
            QdtError::Index(msg) => write!(f, "index out of range: {msg}"),
            QdtError::Dimension { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            QdtError::ZeroNorm => f.write_str("cannot normalize a zero vector"),
            QdtError::Normalization {
                tolerance,
                residuals,
            } => {
                write!(f, "normalization violated (tolerance {tolerance:e}):")?;
                for (name, value) in residuals {
                    write!(f, " {name}={value:e}")?;
                }
                Ok(())
            }
            QdtError::Numerical(msg) => write!(f, "numerical defect: {msg}"),
            QdtError::State(msg) => write!(f, "state error: {msg}"),
        }
    }
}

impl core::error::Error for QdtError {}
