use std::io;
use std::path::PathBuf;

/// Everything the command line can fail with, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] lpdist_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Output(#[from] io::Error),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(_) => 1,
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Output(_) => 2,
            CliError::Verify(_) => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
