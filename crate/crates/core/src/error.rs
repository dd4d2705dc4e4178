use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Every permutation fixes the empty set and the full set, so k = 0 and
    /// k = n admit no base once n >= 2.
    #[error("no base exists for n = {n}, k = {k}: every permutation fixes the only {k}-subset")]
    NoBase { n: u32, k: u32 },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    /// h_l was nonzero below the counting lower bound. Impossible unless the
    /// engine is wrong.
    #[error("h_{l} = {h} is nonzero below the scan lower bound {bound} for n = {n}, k = {k}")]
    LowerBoundViolated {
        n: u32,
        k: u32,
        l: u32,
        bound: u32,
        h: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
