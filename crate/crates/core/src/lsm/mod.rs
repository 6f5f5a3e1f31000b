//! Latent semantic model: movie groups, per-dimension zone geometry,
//! dimension scoring and selection, and model validation statistics.

pub mod groups;
pub mod layout;
pub mod model;
pub mod score;
pub mod validate;

pub use groups::{partition_groups, threshold_ladder, Feedback, Group, MovieGroups, Thumb};
pub use layout::{layout_dimension, DimensionLayout, FamiliarityZone, Interval, LayoutCase, TypicalityZone};
pub use model::{build_user_model, build_user_model_at, ModelSummary, UserModel};
pub use score::{
    dimension_disagreement, interactive_score, max_disagreement, score_dimension, select_dimensions,
    select_dimensions_with, DimensionScore, DimensionSelection, ScoreWeights,
};
pub use validate::{pearson, summarize, validate_model, validate_user, UserValidation, ValidationReport, ValidationSummary};
