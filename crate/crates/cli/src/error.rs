// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

/// Front-end failures, each mapped to a process exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("computation failed: {0}")]
    Compute(#[from] superwave_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    /// 2 for bad input, 3 for anything that failed while computing or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Compute(_) | Self::Io { .. } => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
