use std::cmp::Ordering;

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use crate::lsm::{DimensionLayout, FamiliarityZone, TypicalityZone};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    LikedSimilar,
    Familiar,
    Diverse,
    Typical,
    Untypical,
}

/// Familiar or diverse, typical or un-typical, plus liked-similar when a
/// liked movie lies within `radius` of `x`.
pub fn assign_roles(layout: &DimensionLayout, x: f64, nearest_liked: Option<f64>, radius: f64) -> Vec<Role> {
    let mut roles = Vec::with_capacity(3);
    if nearest_liked.is_some_and(|d| d <= radius) {
        roles.push(Role::LikedSimilar);
    }
    roles.push(match layout.familiarity_zone(x) {
        FamiliarityZone::Familiar => Role::Familiar,
        _ => Role::Diverse,
    });
    roles.push(match layout.typicality_zone(x) {
        TypicalityZone::Untypical => Role::Untypical,
        _ => Role::Typical,
    });
    roles
}

/// Candidate anchor: movie index, projection, user rating, popularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorCandidate {
    pub movie: usize,
    pub x: f64,
    pub rating: u8,
    pub popularity: usize,
}

/// Preference between two movies tied on projection.
fn tie_break(a: &AnchorCandidate, b: &AnchorCandidate) -> Ordering {
    b.rating
        .cmp(&a.rating)
        .then(b.popularity.cmp(&a.popularity))
        .then(a.movie.cmp(&b.movie))
}

/// Leftmost and rightmost candidates; `None` unless at least two distinct
/// projections exist.
pub fn anchor_examples(candidates: &[AnchorCandidate]) -> Option<(AnchorCandidate, AnchorCandidate)> {
    let left = candidates
        .iter()
        .min_by(|a, b| a.x.total_cmp(&b.x).then(tie_break(a, b)))?;
    let right = candidates
        .iter()
        .min_by(|a, b| b.x.total_cmp(&a.x).then(tie_break(a, b)))?;
    (left.x < right.x).then_some((*left, *right))
}

/// Up to `limit` of `liked` ordered by distance to `x` on the dimension,
/// lower index first on ties.
pub fn similar_liked(x: f64, proj: ArrayView1<f64>, liked: &[usize], limit: usize) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = liked.iter().map(|&j| (j, (proj[j] - x).abs())).collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    out.truncate(limit);
    out
}
