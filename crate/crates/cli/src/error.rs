use std::path::PathBuf;

/// Failures of a run, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("numerical failure: {0}")]
    Numerical(#[from] segangle_core::Error),

    #[error("{failed} validation check(s) failed")]
    Validation { failed: usize },
}

impl CliError {
    /// 0 success, 1 validation failure, 2 usage or IO error, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 1,
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Numerical(e) => match e {
                segangle_core::Error::InvalidArgument(_) => 2,
                _ => 3,
            },
        }
    }
}
