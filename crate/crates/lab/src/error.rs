use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;
pub const EXIT_THRESHOLD: i32 = 4;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error("{} replicate(s) failed: {}", .0.len(), summarize(.0))]
    Replicates(Vec<ReplicateFailure>),
    #[error(transparent)]
    Core(#[from] frontier_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("{0}")]
    Threshold(String),
}

#[derive(Debug, Clone)]
pub struct ReplicateFailure {
    pub n: f64,
    pub replicate: usize,
    pub error: frontier_core::Error,
}

fn summarize(failures: &[ReplicateFailure]) -> String {
    failures
        .iter()
        .take(5)
        .map(|f| format!("n={} replicate {}: {}", f.n, f.replicate, f.error))
        .collect::<Vec<_>>()
        .join("; ")
}

impl LabError {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        LabError::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Validation { .. } => EXIT_VALIDATION,
            LabError::Core(e) if is_config_error(e) => EXIT_VALIDATION,
            LabError::Threshold(_) => EXIT_THRESHOLD,
            _ => EXIT_RUNTIME,
        }
    }
}

fn is_config_error(e: &frontier_core::Error) -> bool {
    use frontier_core::Error::*;
    matches!(
        e,
        InvalidBandwidth(_)
            | InvalidArgument { .. }
            | Config(_)
            | UnknownFrontier(_)
            | InvalidFrontier { .. }
            | UnknownKernel(_)
            | UnsupportedKernel { .. }
    )
}
