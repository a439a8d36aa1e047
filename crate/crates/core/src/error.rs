use thiserror::Error;

/// Library-wide error type.
///
/// The CLI maps these onto process exit codes: parse/input problems exit 1,
/// unsupported requests (dimension, grid size) exit 2, numerical failures
/// exit 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported dimension {dim}: the exact sweep handles d = 1 or 2; use grid mode (consensus_grid) for higher dimensions")]
    UnsupportedDimension { dim: usize },

    #[error("grid of {points} points exceeds the limit of {limit}")]
    GridTooLarge { points: u128, limit: u64 },

    #[error("degenerate scale: more than half of the sample is identical (MAD = 0)")]
    DegenerateScale,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Error {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
