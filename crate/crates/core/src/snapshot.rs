//! Binary snapshot of a preprocessed dataset and its latent space.
//!
//! Layout: 8-byte magic, little-endian `u32` format version, then a bincode
//! payload. Floats are stored as raw IEEE-754 bits, so a reload is exact.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ModelParams;
use crate::dataset::{DatasetError, DatasetParts, RatingDataset};
use crate::latent::LatentSpace;

pub const MAGIC: &[u8; 8] = b"STORYREC";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("unsupported snapshot version: expected {expected}, found {}", found.map_or("no snapshot header".to_string(), |v| v.to_string()))]
    Version { expected: u32, found: Option<u32> },
    #[error("corrupt snapshot: {0}")]
    Corrupt(String),
    #[error("snapshot dataset invalid: {0}")]
    Dataset(#[from] DatasetError),
}

#[derive(Serialize, Deserialize)]
struct Payload {
    dataset: DatasetParts,
    space: LatentSpace,
    params: ModelParams,
}

/// Preprocessed state: dataset, factorization and the parameters used to build it.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub dataset: RatingDataset,
    pub space: LatentSpace,
    pub params: ModelParams,
}

pub fn encode_snapshot(ds: &RatingDataset, space: &LatentSpace, params: &ModelParams) -> Result<Vec<u8>, SnapshotError> {
    let payload = Payload {
        dataset: ds.to_parts(),
        space: space.clone(),
        params: params.clone(),
    };
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    bincode::serialize_into(&mut out, &payload).map_err(|e| SnapshotError::Corrupt(e.to_string()))?;
    Ok(out)
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot, SnapshotError> {
    if bytes.len() < 12 || &bytes[..8] != MAGIC {
        return Err(SnapshotError::Version {
            expected: VERSION,
            found: None,
        });
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(SnapshotError::Version {
            expected: VERSION,
            found: Some(version),
        });
    }
    let payload: Payload = bincode::deserialize(&bytes[12..]).map_err(|e| SnapshotError::Corrupt(e.to_string()))?;
    let dataset = RatingDataset::from_parts(payload.dataset)?;
    let space = payload.space;
    if space.movie_count() != dataset.movie_count() || space.user_count() != dataset.user_count() {
        return Err(SnapshotError::Corrupt(format!(
            "factor shapes {}x{} do not match dataset {}x{}",
            space.user_count(),
            space.movie_count(),
            dataset.user_count(),
            dataset.movie_count()
        )));
    }
    Ok(Snapshot {
        dataset,
        space,
        params: payload.params,
    })
}

pub fn save_snapshot(
    path: impl AsRef<Path>,
    ds: &RatingDataset,
    space: &LatentSpace,
    params: &ModelParams,
) -> Result<(), SnapshotError> {
    let path = path.as_ref();
    let io_err = |source| SnapshotError::Io {
        path: path.display().to_string(),
        source,
    };
    let bytes = encode_snapshot(ds, space, params)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    let tmp = path.with_extension("partial");
    let mut f = fs::File::create(&tmp).map_err(io_err)?;
    f.write_all(&bytes).map_err(io_err)?;
    f.sync_all().map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<Snapshot, SnapshotError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| SnapshotError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_snapshot(&bytes)
}
