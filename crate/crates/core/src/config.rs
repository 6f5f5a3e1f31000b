use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::latent::DegreeNormalization;

#[derive(Debug, Error, PartialEq)]
#[error("invalid parameter {name}: {message}")]
pub struct ParamError {
    pub name: &'static str,
    pub message: String,
}

fn check(ok: bool, name: &'static str, message: impl FnOnce() -> String) -> Result<(), ParamError> {
    if ok {
        Ok(())
    } else {
        Err(ParamError {
            name,
            message: message(),
        })
    }
}

/// Group thresholds: like `τ+`, dislike `τ−`, recommendable `τ_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub like: f64,
    pub dislike: f64,
    pub recommend: f64,
}

impl Thresholds {
    /// Initial values before any tuning: `τ+ = τ− = 3`, `τ_r = 0`.
    pub const INITIAL: Thresholds = Thresholds {
        like: 3.0,
        dislike: 3.0,
        recommend: 0.0,
    };

    /// The values used for model validation and all reported results.
    pub const VALIDATION: Thresholds = Thresholds {
        like: 4.0,
        dislike: 2.0,
        recommend: 0.0,
    };
}

impl Default for Thresholds {
    fn default() -> Self {
        Self::VALIDATION
    }
}

/// Everything that shapes the latent semantic model for one user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Truncation rank.
    pub k: usize,
    pub thresholds: Thresholds,
    /// Positive adjusted-rating threshold `w_c` for the recommendable list.
    pub positive_rating: f64,
    pub degree_normalization: DegreeNormalization,
    pub w_plus: f64,
    pub w_overlap: f64,
    pub w_theta: f64,
    /// Global weight on thumb feedback when re-scoring dimensions.
    pub w_interactive: f64,
    /// Dimensions need `D_v > tau_v_ratio · max D_v` to be kept.
    pub tau_v_ratio: f64,
    /// Normalized disagreement below which two dimensions count as similar.
    pub tau_s: f64,
    /// Quantile of `|projection|` marking the un-typical boundary.
    pub rho: f64,
    pub max_dims: usize,
    /// Dimensions topped up from below `τ_v` so stories can rotate.
    pub min_dims: usize,
    /// Step through relaxed thresholds until like and dislike groups are
    /// populated and some dimension scores above zero.
    pub adaptive_thresholds: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            k: 20,
            thresholds: Thresholds::default(),
            positive_rating: 3.0,
            degree_normalization: DegreeNormalization::RatingSum,
            w_plus: 5.0,
            w_overlap: 10.0,
            w_theta: 10.0,
            w_interactive: 1.0,
            tau_v_ratio: 0.5,
            tau_s: 0.1,
            rho: 1.0 / 3.0,
            max_dims: 8,
            min_dims: 3,
            adaptive_thresholds: true,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        check(self.k >= 1, "k", || "must be at least 1".into())?;
        let t = &self.thresholds;
        check((1.0..=5.0).contains(&t.like), "tau_plus", || format!("{} not in [1, 5]", t.like))?;
        check((1.0..=6.0).contains(&t.dislike), "tau_minus", || format!("{} not in [1, 6]", t.dislike))?;
        check(t.dislike <= t.like, "tau_minus", || format!("{} exceeds tau_plus {}", t.dislike, t.like))?;
        check((0.0..=1.0).contains(&t.recommend), "tau_r", || format!("{} not in [0, 1]", t.recommend))?;
        for (name, w) in [("w_plus", self.w_plus), ("w_o", self.w_overlap), ("w_theta", self.w_theta)] {
            check(w >= 0.0 && w.is_finite(), name, || format!("{w} must be a finite non-negative weight"))?;
        }
        check(self.w_interactive >= 0.0, "w_int", || "must be non-negative".into())?;
        check((0.0..=1.0).contains(&self.tau_v_ratio), "tau_v", || format!("{} not in [0, 1]", self.tau_v_ratio))?;
        check((0.0..=1.0).contains(&self.tau_s), "tau_s", || format!("{} not in [0, 1]", self.tau_s))?;
        check(self.rho > 0.0 && self.rho < 1.0, "rho", || format!("{} not in (0, 1)", self.rho))?;
        check(self.max_dims >= 1, "max_dims", || "must be at least 1".into())?;
        check(self.min_dims <= self.max_dims, "min_dims", || "must not exceed max_dims".into())?;
        Ok(())
    }
}

/// Story sampling parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryParams {
    /// Events per story (`T`).
    pub length: usize,
    /// Local window half-width as a fraction of the zone length.
    pub window_frac: f64,
    /// Thumb influence radius as a fraction of the dimension extent.
    pub thumb_radius_frac: f64,
    pub alpha_up: f64,
    pub alpha_down: f64,
    /// Distance floor as a fraction of the dimension extent.
    pub epsilon_frac: f64,
    /// Rejections tolerated by the admission test before the best rejected candidate is taken.
    pub max_retries: usize,
    /// Similar liked movies attached to each event.
    pub similar_liked: usize,
}

impl Default for StoryParams {
    fn default() -> Self {
        StoryParams {
            length: 5,
            window_frac: 0.1,
            thumb_radius_frac: 0.15,
            alpha_up: 1.0,
            alpha_down: 0.9,
            epsilon_frac: 1e-6,
            max_retries: 20,
            similar_liked: 4,
        }
    }
}

impl StoryParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        check(self.length >= 1, "T", || "must be at least 1".into())?;
        check(self.window_frac > 0.0, "delta_w", || "must be positive".into())?;
        check(self.thumb_radius_frac > 0.0, "delta", || "must be positive".into())?;
        check(self.alpha_up >= 0.0, "alpha_up", || "must be non-negative".into())?;
        check((0.0..=1.0).contains(&self.alpha_down), "alpha_down", || "must be in [0, 1]".into())?;
        check(self.epsilon_frac > 0.0, "epsilon", || "must be positive".into())?;
        Ok(())
    }
}
