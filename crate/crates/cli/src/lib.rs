//! Operator commands: preprocess, validate, recommend and serve.

pub mod commands;
pub mod config;

use storyrec_core::snapshot::SnapshotError;
use storyrec_core::{Error, StoryError};

/// A problem with what the operator supplied: paths, ids, parameters.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct InputError(pub String);

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_INTERNAL: u8 = 2;

/// 1 for input errors anywhere in the chain, 2 for everything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<InputError>()
            || cause.is::<storyrec_core::dataset::DatasetError>()
            || cause.is::<storyrec_core::config::ParamError>()
        {
            return EXIT_INPUT;
        }
        // a missing, foreign or damaged snapshot file is the operator's to fix
        if cause.is::<SnapshotError>() {
            return EXIT_INPUT;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::UnknownUser(_)
                | Error::UnknownMovie(_)
                | Error::UnknownDimension { .. }
                | Error::Params(_)
                | Error::Dataset(_)
                | Error::Snapshot(_)
                | Error::Story(StoryError::InvalidPreference { .. })
                | Error::Story(StoryError::PoolExhausted { .. })
                | Error::Story(StoryError::NoDimensions) => EXIT_INPUT,
                Error::Factorize(_) | Error::Replay { .. } => EXIT_INTERNAL,
            };
        }
    }
    EXIT_INTERNAL
}
