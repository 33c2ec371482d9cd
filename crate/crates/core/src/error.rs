use thiserror::Error;

use crate::poly::ParsePolyError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("disconnected graph")]
    Disconnected,
    #[error("unknown edge id {0}")]
    UnknownEdge(u16),
    #[error("edge {0} is a loop and cannot be contracted")]
    LoopContraction(u16),
    #[error("edge {0} is both deleted and contracted")]
    OverlappingMinor(u16),
    #[error("graph parse error: {0}")]
    GraphParse(String),
    #[error("polynomial parse error: {0}")]
    PolyParse(#[from] ParsePolyError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("required configuration absent: {0}")]
    ConfigurationAbsent(String),
    #[error(
        "budget exceeded: {points} point evaluations exceed the single-process limit of {limit}; \
         split the job with at least {shards} shards"
    )]
    Budget { points: u128, limit: u128, shards: u64 },
    #[error("not a perfect square: {0}")]
    NotSquare(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the error class: 2 input, 3 budget, 4 consistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } => 3,
            Error::NotSquare(_) | Error::Consistency(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
