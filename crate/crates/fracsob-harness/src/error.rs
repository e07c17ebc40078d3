//! Harness-level failures: configuration problems and artifact I/O,
//! layered over the library's computational errors.

use std::fmt;
use std::io;
use std::path::PathBuf;

/// Everything that can go wrong while loading a config, running an
/// experiment, or writing its artifacts. Library errors pass through
/// unchanged so their messages stay authoritative.
#[derive(Debug)]
pub enum HarnessError {
    /// The library rejected parameters or a computation failed.
    Lib(fracsob::Error),
    /// The experiment configuration is malformed or inconsistent.
    Config { reason: String },
    /// Reading a config file or writing an artifact failed.
    Io { path: PathBuf, source: io::Error },
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub fn config(reason: impl Into<String>) -> Self {
        HarnessError::Config { reason: reason.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Lib(e) => write!(f, "{e}"),
            HarnessError::Config { reason } => write!(f, "config error: {reason}"),
            HarnessError::Io { path, source } => {
                write!(f, "io error at {}: {source}", path.display())
            }
        }
    }
}

impl std::error::Error for HarnessError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            HarnessError::Lib(e) => Some(e),
            HarnessError::Config { .. } => None,
            HarnessError::Io { source, .. } => Some(source),
        }
    }
}

impl From<fracsob::Error> for HarnessError {
    fn from(e: fracsob::Error) -> Self {
        HarnessError::Lib(e)
    }
}
