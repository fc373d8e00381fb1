use std::path::{Path, PathBuf};

use teamdiff_core::Error as CoreError;

/// Failures of a CLI invocation, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid config at `{path}`: {msg}")]
    Config { path: String, msg: String },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1 usage or invalid input, 2 divergence, 3 assumption violation, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 1,
            CliError::Core(CoreError::Divergence { .. }) => 2,
            CliError::Core(CoreError::AssumptionViolation { .. }) => 3,
            CliError::Core(_) => 1,
            CliError::Io { .. } => 4,
        }
    }
}
