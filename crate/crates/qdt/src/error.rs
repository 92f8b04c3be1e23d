use qdt_core::QdtError;
use thiserror::Error;

/// Errors surfaced by scenario loading, evaluation and the CLI.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] QdtError),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ScenarioError {
    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioError::Parse { .. } => "ParseError",
            ScenarioError::Core(e) => e.kind(),
            ScenarioError::Usage(_) => "UsageError",
            ScenarioError::Io { .. } => "IoError",
        }
    }

    /// 1 for failed validation, 2 for unusable input.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Core(
                QdtError::Normalization { .. } | QdtError::Numerical(_) | QdtError::State(_),
            ) => 1,
            _ => 2,
        }
    }
}

impl From<serde_json::Error> for ScenarioError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep only the description
        let message = match message.rfind(" at line ") {
            Some(pos) => message[..pos].to_string(),
            None => message,
        };
        ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

pub type Result<T, E = ScenarioError> = std::result::Result<T, E>;
