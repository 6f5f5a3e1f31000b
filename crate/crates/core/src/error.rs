use thiserror::Error;

use crate::config::ParamError;
use crate::dataset::DatasetError;
use crate::latent::FactorizeError;
use crate::snapshot::SnapshotError;
use crate::story::StoryError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown user {0}")]
    UnknownUser(u32),
    #[error("unknown movie {0}")]
    UnknownMovie(u32),
    #[error("dimension {dimension} outside 0..{k}")]
    UnknownDimension { dimension: usize, k: usize },
    #[error(transparent)]
    Story(#[from] StoryError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Factorize(#[from] FactorizeError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("session log line {line}: {message}")]
    Replay { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
