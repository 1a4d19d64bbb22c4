use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    FileNotReadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    SchemaMismatch { expected: String, found: String },

    #[error("line {line}: {reason}")]
    RowParseError { line: u64, reason: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("home-only and away-only filters are mutually exclusive")]
    ConflictingFilter,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sequences belong to more than one player ({first} and {other})")]
    MixedPlayers { first: String, other: String },

    #[error("no input to aggregate")]
    EmptyInput,

    #[error("no player has a defined correlation at any requested lag")]
    NoDefinedPoints,

    #[error("lag {lag}: {n_pairs} pairs is fewer than the required {min_pairs}")]
    TooFewPairs {
        lag: usize,
        n_pairs: u64,
        min_pairs: u64,
    },

    #[error("observed correlation is undefined (a side has zero variance)")]
    ZeroVariance,

    #[error("season {0} does not occur in the dataset")]
    UnknownSeason(i32),

    #[error("metrics computed at different lags ({0} and {1})")]
    LagMismatch(usize, usize),

    #[error("only {0} players matched across seasons, need at least 3")]
    TooFewPlayers(usize),

    #[error("invalid league spec: {0}")]
    InvalidSpec(String),

    #[error("operation requires a gap-coupled shooter model")]
    WrongModelKind,

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
