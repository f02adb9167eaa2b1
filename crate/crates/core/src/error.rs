use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the spectrum-map pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cell ({i}, {j}) outside a {n}x{n} grid")]
    CellOutOfRange { i: usize, j: usize, n: usize },

    #[error("infeasible scene: {0}")]
    Infeasible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("not enough samples: need at least {needed}, got {got}")]
    NotEnoughSamples { needed: usize, got: usize },

    #[error("variogram fit needs at least 3 non-empty lag bins, got {0}")]
    TooFewBins(usize),

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),

    #[error("file truncated in {0}")]
    Truncated(String),

    #[error("record {record}: {what} contains value {value} outside {{0, 1}}")]
    NonBinary { record: usize, what: &'static str, value: u8 },

    #[error("record {record}: {what} contains a non-finite value")]
    NonFinite { record: usize, what: &'static str },

    #[error("invalid header: {0}")]
    Header(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
