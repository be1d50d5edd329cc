//! File formats, the parallel step driver, the command line and the session
//! server for the `qgol-core` automaton.

pub mod catalogue;
pub mod driver;
pub mod report;
pub mod scene;
pub mod server;
pub mod snapshot;
pub mod trajectory;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] qgol_core::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
