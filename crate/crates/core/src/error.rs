use std::path::PathBuf;

use thiserror::Error;

use crate::metrics::Metric;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed header {path}: {reason}")]
    Header { path: PathBuf, reason: String },
    #[error("raw file {path} has {actual} bytes, expected {expected}")]
    LengthMismatch {
        path: PathBuf,
        expected: usize,
        actual: usize,
    },
    #[error("raw byte at index {index} has value {value}, expected 0 or 1")]
    InvalidByte { index: usize, value: u8 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("masks do not share a grid: {0}")]
    GridMismatch(String),
    #[error("invalid metric configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("{metric} refused: input {which} is empty")]
    EmptyInput { metric: Metric, which: EmptySide },
    #[error("grid-sampled distances need element-centered query and target points")]
    OffLatticePoints,
}

/// Which of the two inputs was empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptySide {
    A,
    B,
    Both,
}

impl std::fmt::Display for EmptySide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EmptySide::A => "A",
            EmptySide::B => "B",
            EmptySide::Both => "A and B",
        })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
