//! Interactive movie recommendation over a truncated-SVD latent space:
//! rating ingestion, latent semantic model, story generation and sessions.

pub mod config;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod latent;
pub mod lsm;
pub mod session;
pub mod snapshot;
pub mod story;
pub mod svd;

pub use config::{ModelParams, StoryParams, Thresholds};
pub use dataset::{load_movielens, MovieId, RatingDataset, UserId};
pub use engine::{DetailView, DimensionView, Engine, UserProfile};
pub use error::{Error, Result};
pub use session::{replay, SessionEvent, SessionState};
pub use story::{Preferences, Story, StoryError};
