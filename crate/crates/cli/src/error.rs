use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(wplab_core::Error),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<wplab_core::Error> for CliError {
    fn from(e: wplab_core::Error) -> Self {
        match e {
            wplab_core::Error::InvalidArgument(msg) => CliError::Config(msg),
            other => CliError::Numerical(other),
        }
    }
}
