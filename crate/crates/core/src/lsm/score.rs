use std::cmp::Ordering;

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use super::groups::Feedback;
use super::layout::DimensionLayout;
use crate::config::ModelParams;
use crate::latent::LatentSpace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreWeights {
    pub plus: f64,
    pub overlap: f64,
    pub theta: f64,
}

impl ScoreWeights {
    pub fn from_params(p: &ModelParams) -> Self {
        ScoreWeights {
            plus: p.w_plus,
            overlap: p.w_overlap,
            theta: p.w_theta,
        }
    }
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights::from_params(&ModelParams::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionScore {
    pub dimension: usize,
    /// `D_v`
    pub suitability: f64,
    /// `D′_v`; equals `suitability` without thumbs.
    pub interactive: f64,
}

/// `D_v` from the four interval-length factors. Zero for a degenerate layout,
/// a zero-length like or dislike region, or `θ_+ = 0`.
pub fn score_dimension(layout: &DimensionLayout, w: &ScoreWeights) -> f64 {
    if layout.is_degenerate() || layout.dislike.is_none() {
        return 0.0;
    }
    let like = layout.like_len();
    let dislike = layout.dislike_len();
    let overlap = layout.overlap_len();
    let theta = layout.recommendable_std;
    if like <= 0.0 || dislike <= 0.0 || theta <= 0.0 {
        return 0.0;
    }
    let combined = layout.combined_len();
    let v = (like / combined).powf(w.plus)
        * (1.0 - overlap / like).powf(w.overlap)
        * (1.0 - overlap / dislike).powf(w.overlap)
        * (like / theta).powf(w.theta);
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

/// Weighted count of recommendable movies whose like / dislike region
/// membership differs between two dimensions.
pub fn dimension_disagreement(
    p: &DimensionLayout,
    xp: ArrayView1<f64>,
    q: &DimensionLayout,
    xq: ArrayView1<f64>,
    candidates: &[usize],
    feedback: &Feedback,
) -> f64 {
    candidates
        .iter()
        .map(|&i| {
            let plus = p.in_like(xp[i]) != q.in_like(xq[i]);
            let minus = p.in_dislike(xp[i]) != q.in_dislike(xq[i]);
            feedback.weight(i) * (plus as u8 + minus as u8) as f64
        })
        .sum()
}

/// Largest possible disagreement: every candidate differing on both memberships.
pub fn max_disagreement(candidates: &[usize], feedback: &Feedback) -> f64 {
    candidates.iter().map(|&i| 2.0 * feedback.weight(i)).sum()
}

/// `D′_v`: rewards thumbs-up inside the like region and thumbs-down inside
/// the dislike region, penalizes the opposite.
pub fn interactive_score(
    suitability: f64,
    layout: &DimensionLayout,
    x: ArrayView1<f64>,
    feedback: &Feedback,
    degrees: &[Option<f64>],
    w_int: f64,
) -> f64 {
    let b = |i: usize| degrees[i].unwrap_or(0.0);
    let mut agree = 0.0;
    let mut disagree = 0.0;
    for &i in &feedback.up {
        if layout.in_like(x[i]) {
            agree += b(i);
        }
        if layout.in_dislike(x[i]) {
            disagree += b(i);
        }
    }
    for &i in &feedback.down {
        if layout.in_dislike(x[i]) {
            agree += b(i);
        }
        if layout.in_like(x[i]) {
            disagree += b(i);
        }
    }
    suitability + w_int * (agree - disagree)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionSelection {
    /// Chosen dimensions, best first.
    pub dimensions: Vec<usize>,
    /// No dimension scored above zero; the list is the top dimensions by `D_v`.
    pub fallback: bool,
}

fn by_score_desc(a: (usize, f64), b: (usize, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

/// Filters dimensions by `τ_v`, drops near-duplicates (normalized `D_s < τ_s`,
/// keeping the higher `D_v`), tops up to `min_dims`, and orders by `D′_v`.
pub fn select_dimensions(
    scores: &[DimensionScore],
    layouts: &[DimensionLayout],
    space: &LatentSpace,
    candidates: &[usize],
    feedback: &Feedback,
    params: &ModelParams,
) -> DimensionSelection {
    select_dimensions_with(scores, |p, q| {
        let total = max_disagreement(candidates, feedback);
        if total == 0.0 {
            return 0.0;
        }
        dimension_disagreement(&layouts[p], space.dimension(p), &layouts[q], space.dimension(q), candidates, feedback) / total
    }, params)
}

/// [`select_dimensions`] with a caller-supplied normalized disagreement.
pub fn select_dimensions_with(
    scores: &[DimensionScore],
    normalized_disagreement: impl Fn(usize, usize) -> f64,
    params: &ModelParams,
) -> DimensionSelection {
    let mut ranked: Vec<(usize, f64)> = scores.iter().map(|s| (s.dimension, s.suitability)).collect();
    ranked.sort_by(|&a, &b| by_score_desc(a, b));
    let best = ranked.first().map_or(0.0, |r| r.1);
    let interactive = |p: usize| scores.iter().find(|s| s.dimension == p).map_or(0.0, |s| s.interactive);
    let order_interactive = |dims: &mut Vec<usize>| {
        dims.sort_by(|&a, &b| by_score_desc((a, interactive(a)), (b, interactive(b))));
    };

    if best <= 0.0 {
        let mut dims: Vec<usize> = ranked.iter().take(params.max_dims).map(|r| r.0).collect();
        order_interactive(&mut dims);
        return DimensionSelection {
            dimensions: dims,
            fallback: true,
        };
    }

    let tau_v = params.tau_v_ratio * best;
    let similar_to_kept = |kept: &[usize], p: usize| {
        kept.iter().any(|&q| normalized_disagreement(p, q) < params.tau_s)
    };
    let mut kept: Vec<usize> = Vec::new();
    for &(p, d) in &ranked {
        if d > tau_v && !similar_to_kept(&kept, p) {
            kept.push(p);
        }
    }
    for &(p, d) in &ranked {
        if kept.len() >= params.min_dims {
            break;
        }
        if d > 0.0 && !kept.contains(&p) && !similar_to_kept(&kept, p) {
            kept.push(p);
        }
    }
    order_interactive(&mut kept);
    kept.truncate(params.max_dims);
    DimensionSelection {
        dimensions: kept,
        fallback: false,
    }
}
