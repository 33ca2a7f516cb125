//! Library side of the `eilscond` command-line tool: problem bundles on
//! disk, condition-number reports and the experiment drivers.

pub mod bundle;
pub mod commands;
pub mod experiment;
pub mod mm;

use std::path::{Path, PathBuf};

use eilscond::EilsError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Format(String),
    #[error("checksum mismatch for {0}")]
    Checksum(String),
    #[error(transparent)]
    Eils(#[from] EilsError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    /// 2 usage, 3 input/output, 4 violated problem assumptions,
    /// 5 memory guard refusal, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Format(_) | CliError::Checksum(_) => 3,
            CliError::Eils(EilsError::AssumptionViolated(_)) => 4,
            CliError::Eils(EilsError::MemoryGuard { .. }) => 5,
            CliError::Eils(_) => 1,
        }
    }
}
