use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: cvtda_core::Error,
    },

    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl CliError {
    pub fn core(context: impl Into<String>) -> impl FnOnce(cvtda_core::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Core { context, source }
    }

    /// 2 for usage problems, 3 for unreadable or malformed input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use cvtda_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Json { .. } => 3,
            CliError::Core { source, .. } => match source {
                E::Io { .. }
                | E::Format { .. }
                | E::DimensionMismatch { .. }
                | E::EmptyCloud
                | E::NonFinite { .. } => 3,
                E::Argument(_) | E::InvalidEpsilon(_) | E::Size { .. } => 2,
                _ => 1,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
