use serde::Serialize;

use super::groups::{partition_groups, threshold_ladder, Feedback, MovieGroups};
use super::layout::{layout_dimension, DimensionLayout};
use super::score::{
    interactive_score, score_dimension, select_dimensions, DimensionScore, DimensionSelection, ScoreWeights,
};
use crate::config::{ModelParams, Thresholds};
use crate::latent::{LatentSpace, UserNeighborhood};

/// Everything the story generator needs about one user in one feedback state.
#[derive(Debug, Clone)]
pub struct UserModel {
    pub groups: MovieGroups,
    pub layouts: Vec<DimensionLayout>,
    pub scores: Vec<DimensionScore>,
    pub selection: DimensionSelection,
    /// Thresholds actually used; differs from the configured ones after adaptation.
    pub thresholds: Thresholds,
    /// Position on the threshold ladder, 0 for the configured thresholds.
    pub ladder_step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelSummary {
    pub thresholds: Thresholds,
    pub ladder_step: usize,
    pub best_dimension: Option<usize>,
    pub fallback: bool,
}

impl UserModel {
    pub fn score(&self, p: usize) -> &DimensionScore {
        &self.scores[p]
    }

    /// Dimension with the highest `D_v`, lowest index on ties.
    pub fn best_dimension(&self) -> Option<usize> {
        self.scores
            .iter()
            .max_by(|a, b| a.suitability.total_cmp(&b.suitability).then(b.dimension.cmp(&a.dimension)))
            .map(|s| s.dimension)
    }

    /// Dimensions ranked by `D_v` (`interactive = false`) or `D′_v`.
    pub fn ranking(&self, interactive: bool) -> Vec<usize> {
        let key = |s: &DimensionScore| if interactive { s.interactive } else { s.suitability };
        let mut dims: Vec<usize> = (0..self.scores.len()).collect();
        dims.sort_by(|&a, &b| key(&self.scores[b]).total_cmp(&key(&self.scores[a])).then(a.cmp(&b)));
        dims
    }

    pub fn summary(&self) -> ModelSummary {
        ModelSummary {
            thresholds: self.thresholds,
            ladder_step: self.ladder_step,
            best_dimension: self.best_dimension(),
            fallback: self.selection.fallback,
        }
    }
}

struct Rung {
    groups: MovieGroups,
    layouts: Vec<DimensionLayout>,
    suitability: Vec<f64>,
}

fn evaluate(
    space: &LatentSpace,
    ratings: &[(usize, u8)],
    nb: &UserNeighborhood,
    feedback: &Feedback,
    thresholds: Thresholds,
    params: &ModelParams,
) -> Rung {
    let groups = partition_groups(space.movie_count(), ratings, &nb.degrees, feedback, thresholds);
    let weights = ScoreWeights::from_params(params);
    let layouts: Vec<DimensionLayout> = (0..space.k)
        .map(|p| layout_dimension(p, space.dimension(p), &groups, params.rho))
        .collect();
    let suitability = layouts.iter().map(|l| score_dimension(l, &weights)).collect();
    Rung {
        groups,
        layouts,
        suitability,
    }
}

fn usable(rung: &Rung) -> bool {
    !rung.groups.like_region_members().is_empty()
        && !rung.groups.dislike_region_members().is_empty()
        && rung.suitability.iter().any(|&d| d > 0.0)
}

/// Partitions movies, lays out and scores every dimension, and selects the
/// story dimensions. With adaptive thresholds, walks the threshold ladder
/// until like and dislike groups are populated and some dimension scores
/// above zero; otherwise (or if no rung qualifies) the configured thresholds
/// are used.
pub fn build_user_model(
    space: &LatentSpace,
    ratings: &[(usize, u8)],
    nb: &UserNeighborhood,
    feedback: &Feedback,
    params: &ModelParams,
) -> UserModel {
    build_user_model_at(space, ratings, nb, feedback, params, params.thresholds)
}

/// [`build_user_model`] starting the ladder at `base`.
pub fn build_user_model_at(
    space: &LatentSpace,
    ratings: &[(usize, u8)],
    nb: &UserNeighborhood,
    feedback: &Feedback,
    params: &ModelParams,
    base: Thresholds,
) -> UserModel {
    let ladder = if params.adaptive_thresholds {
        threshold_ladder(base)
    } else {
        vec![base]
    };
    let mut chosen = None;
    for (step, &t) in ladder.iter().enumerate() {
        let rung = evaluate(space, ratings, nb, feedback, t, params);
        if usable(&rung) {
            chosen = Some((step, t, rung));
            break;
        }
    }
    let (ladder_step, thresholds, rung) =
        chosen.unwrap_or_else(|| (0, base, evaluate(space, ratings, nb, feedback, base, params)));

    let scores: Vec<DimensionScore> = rung
        .layouts
        .iter()
        .zip(&rung.suitability)
        .map(|(l, &d)| DimensionScore {
            dimension: l.dimension,
            suitability: d,
            interactive: interactive_score(
                d,
                l,
                space.dimension(l.dimension),
                feedback,
                &nb.degrees,
                params.w_interactive,
            ),
        })
        .collect();
    let selection = select_dimensions(&scores, &rung.layouts, space, &nb.recommendable, feedback, params);
    UserModel {
        groups: rung.groups,
        layouts: rung.layouts,
        scores,
        selection,
        thresholds,
        ladder_step,
    }
}
