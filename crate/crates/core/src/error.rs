use std::path::PathBuf;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A user-supplied parameter is out of range or not accepted.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Input data violates a precondition (non-finite coordinate, too few points, ...).
    #[error("data error: {0}")]
    Data(String),

    /// A non-finite coordinate was found at the given point index.
    #[error("data error: point {index} has a non-finite coordinate")]
    NonFinite { index: usize },

    /// An internal or caller contract was broken (length mismatch, cycle, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A PLY header or ascii body line could not be parsed.
    #[error("PLY parse error at line {line}: {message}")]
    PlyParse { line: usize, message: String },

    /// The PLY body ended before all declared elements were read.
    #[error("PLY truncated: header declares {expected} vertices, found {found}")]
    Truncated { expected: usize, found: usize },

    /// A synthetic field config file could not be read.
    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
