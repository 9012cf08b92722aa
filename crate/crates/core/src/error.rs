use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("encoding {value} out of range for {teams} teams (must be < 3^{matches})")]
    EncodingOutOfRange {
        value: u128,
        teams: usize,
        matches: usize,
    },

    #[error("score table incomplete: no result for home team {home} vs away team {away}")]
    IncompleteTable { home: usize, away: usize },

    #[error("score table parse error on line {line}: {message}")]
    TableParse { line: usize, message: String },

    /// A run that is possible in principle but refused because of its cost.
    #[error("refusing {what} for {teams} teams: {reason}")]
    SizeRefused {
        what: &'static str,
        teams: usize,
        reason: String,
    },

    #[error("unsupported league size {teams}: {what} supports {min}..={max} teams")]
    UnsupportedSize {
        what: &'static str,
        teams: usize,
        min: usize,
        max: usize,
    },

    #[error("exact arithmetic overflow while {0}")]
    Overflow(&'static str),

    #[error("checkpoint {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },

    #[error("stale checkpoint {path}: {message}")]
    StaleCheckpoint { path: PathBuf, message: String },

    #[error("checkpoint {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("worker failed on profile {profile:?} after {attempts} attempts: {message}")]
    WorkerFailed {
        profile: Vec<u8>,
        attempts: u32,
        message: String,
    },

    #[error("run interrupted after {completed} of {total} search profiles")]
    Interrupted { completed: usize, total: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
