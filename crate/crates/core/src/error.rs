use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {count} is not a perfect square; APs are deployed on a square grid")]
    NonSquareApCount { what: &'static str, count: usize },

    #[error("invalid room: {0}")]
    InvalidRoom(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("transmitter and receiver are at the same position")]
    CoincidentPositions,

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("exhaustive search over {n_users} users exceeds the limit of {limit}")]
    TooManyUsers { n_users: usize, limit: usize },

    #[error("empty rate pool")]
    EmptyPool,

    #[error("config error: {0}")]
    Config(String),

    #[error("trial failed (seed {seed}): {source}")]
    Trial {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Configuration problems map to exit code 1, everything else to 2.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidRoom(_)
                | Error::InvalidParameter(_)
                | Error::NonSquareApCount { .. }
                | Error::TooManyUsers { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
