use std::io;
use std::path::PathBuf;

/// Failures surfaced by the command-line tool.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("data: {0}")]
    Data(String),
    #[error("schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Core(#[from] geojam_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 usage/config, 2 data/schema, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) => 1,
            Error::Io { .. } | Error::Data(_) | Error::Schema(_) => 2,
            Error::Core(e) if e.is_numerical() => 3,
            Error::Core(geojam_core::Error::InvalidConfig(_)) => 1,
            Error::Core(_) => 2,
        }
    }
}
