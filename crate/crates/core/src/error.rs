use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("p divides d (d={d}, p={p})")]
    PDividesD { d: u64, p: u64 },

    /// An arithmetic identity that must hold did not. Always a bug.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("naive order search exceeded cap {cap} (d={d}, p={p})")]
    OracleFailure { d: u64, p: u64, cap: u64 },

    #[error("empty histogram for case j={0}")]
    EmptyHistogram(u8),

    #[error("corrupt checkpoint {path}: {reason}")]
    CorruptCheckpoint { path: PathBuf, reason: String },

    #[error(
        "checkpoint {path} was written for a different sweep (digest {found}, expected {expected})"
    )]
    CheckpointMismatch {
        path: PathBuf,
        found: String,
        expected: String,
    },

    #[error("{path}:{line}: {reason}")]
    Format {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
