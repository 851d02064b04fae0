use std::path::PathBuf;

/// Failures of the command-line driver, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed or inconsistent configuration.
    #[error("config error: {0}")]
    Config(String),

    /// A numerical build, study or solve failed.
    #[error("solver failure: {0}")]
    Solver(ser_core::Error),

    /// Reading or writing a file failed.
    #[error("I/O error on {path}: {source}")]
    Io {
        /// File concerned.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },

    /// A file exists but its contents are not what was expected.
    #[error("cannot read {path}: {reason}")]
    Format {
        /// File concerned.
        path: PathBuf,
        /// What is wrong with it.
        reason: String,
    },
}

impl CliError {
    /// Process exit code: 2 config, 3 solver, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io { .. } | CliError::Format { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<ser_core::Error> for CliError {
    fn from(e: ser_core::Error) -> Self {
        CliError::Solver(e)
    }
}

/// Shorthand for driver results.
pub type Result<T> = std::result::Result<T, CliError>;
