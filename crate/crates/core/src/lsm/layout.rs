use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use super::groups::{Group, MovieGroups};

/// Closed interval `[lo, hi]` on a latent dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// Smallest interval covering `values`; `None` for an empty input.
    pub fn hull(values: impl IntoIterator<Item = f64>) -> Option<Interval> {
        values.into_iter().fold(None, |acc, x| match acc {
            None => Some(Interval::new(x, x)),
            Some(iv) => Some(Interval::new(iv.lo.min(x), iv.hi.max(x))),
        })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then(|| Interval::new(lo, hi))
    }

    pub fn span(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

fn len_of(iv: Option<Interval>) -> f64 {
    iv.map_or(0.0, |i| i.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamiliarityZone {
    Familiar,
    DiverseLeft,
    DiverseRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypicalityZone {
    TypicalLeft,
    Untypical,
    TypicalRight,
}

/// Relative placement of the like and dislike regions on a dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutCase {
    /// Case 1: like and dislike regions do not meet.
    Separated,
    /// Case 2: partial overlap, neither contains the other.
    Overlapping,
    /// Case 3: dislike region inside the like region.
    DislikeInsideLike,
    /// Case 4: like region inside the dislike region.
    LikeInsideDislike,
    /// A region is missing.
    Degenerate,
}

impl LayoutCase {
    pub fn number(&self) -> Option<u8> {
        match self {
            LayoutCase::Separated => Some(1),
            LayoutCase::Overlapping => Some(2),
            LayoutCase::DislikeInsideLike => Some(3),
            LayoutCase::LikeInsideDislike => Some(4),
            LayoutCase::Degenerate => None,
        }
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self, LayoutCase::Separated | LayoutCase::Overlapping)
    }
}

/// Semantic-zone geometry of one latent dimension for one user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionLayout {
    pub dimension: usize,
    /// Range of every movie's projection.
    pub extent: Interval,
    /// `R_+`
    pub like: Option<Interval>,
    /// `R_−`
    pub dislike: Option<Interval>,
    /// `R_o = R_+ ∩ R_−`
    pub overlap: Option<Interval>,
    /// `R`, the hull of `R_+ ∪ R_−`.
    pub combined: Option<Interval>,
    pub familiar: Option<Interval>,
    pub diverse_left: Option<Interval>,
    pub diverse_right: Option<Interval>,
    /// `|x| ≤ θ_u` is un-typical.
    pub untypical_boundary: f64,
    /// `θ_+`, spread of recommendable movies inside `R_+`.
    pub recommendable_std: f64,
    /// `c_+`, midpoint of `R_+`.
    pub like_center: Option<f64>,
    /// Where diverse-left ends and diverse-right begins when there is no familiar zone.
    split: f64,
}

impl DimensionLayout {
    pub fn is_degenerate(&self) -> bool {
        self.like.is_none()
    }

    pub fn like_len(&self) -> f64 {
        len_of(self.like)
    }

    pub fn dislike_len(&self) -> f64 {
        len_of(self.dislike)
    }

    pub fn overlap_len(&self) -> f64 {
        len_of(self.overlap)
    }

    pub fn combined_len(&self) -> f64 {
        len_of(self.combined)
    }

    pub fn in_like(&self, x: f64) -> bool {
        self.like.is_some_and(|iv| iv.contains(x))
    }

    pub fn in_dislike(&self, x: f64) -> bool {
        self.dislike.is_some_and(|iv| iv.contains(x))
    }

    pub fn in_overlap(&self, x: f64) -> bool {
        self.overlap.is_some_and(|iv| iv.contains(x))
    }

    pub fn familiarity_zone(&self, x: f64) -> FamiliarityZone {
        match self.familiar {
            Some(f) if f.contains(x) => FamiliarityZone::Familiar,
            Some(f) if x < f.lo => FamiliarityZone::DiverseLeft,
            Some(_) => FamiliarityZone::DiverseRight,
            None if x < self.split => FamiliarityZone::DiverseLeft,
            None => FamiliarityZone::DiverseRight,
        }
    }

    /// The boundary itself belongs to the un-typical zone.
    pub fn typicality_zone(&self, x: f64) -> TypicalityZone {
        if x > self.untypical_boundary {
            TypicalityZone::TypicalRight
        } else if x < -self.untypical_boundary {
            TypicalityZone::TypicalLeft
        } else {
            TypicalityZone::Untypical
        }
    }

    pub fn typical_left(&self) -> Option<Interval> {
        (self.extent.lo < -self.untypical_boundary)
            .then(|| Interval::new(self.extent.lo, -self.untypical_boundary))
    }

    pub fn typical_right(&self) -> Option<Interval> {
        (self.extent.hi > self.untypical_boundary)
            .then(|| Interval::new(self.untypical_boundary, self.extent.hi))
    }

    pub fn untypical(&self) -> Option<Interval> {
        Interval::new(-self.untypical_boundary, self.untypical_boundary).intersect(&self.extent)
    }

    /// Largest `|x|` over all movies.
    pub fn max_abs(&self) -> f64 {
        self.extent.lo.abs().max(self.extent.hi.abs())
    }

    pub fn case(&self) -> LayoutCase {
        match (self.like, self.dislike) {
            (Some(like), Some(dislike)) => {
                if self.overlap.is_none() {
                    LayoutCase::Separated
                } else if like.contains_interval(&dislike) {
                    LayoutCase::DislikeInsideLike
                } else if dislike.contains_interval(&like) {
                    LayoutCase::LikeInsideDislike
                } else {
                    LayoutCase::Overlapping
                }
            }
            _ => LayoutCase::Degenerate,
        }
    }
}

/// Nearest-rank `q`-quantile of `values`; 0 for an empty input.
pub fn quantile(values: &mut [f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let rank = (q * values.len() as f64).ceil() as usize;
    values[rank.clamp(1, values.len()) - 1]
}

fn population_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}

/// Computes the zone geometry of dimension `p` from the movies' projections on it.
pub fn layout_dimension(
    dimension: usize,
    projections: ArrayView1<f64>,
    groups: &MovieGroups,
    rho: f64,
) -> DimensionLayout {
    let x = |i: usize| projections[i];
    let extent = Interval::hull(projections.iter().copied()).unwrap_or(Interval::new(0.0, 0.0));
    let like = Interval::hull(groups.like_region_members().into_iter().map(x));
    let dislike = Interval::hull(groups.dislike_region_members().into_iter().map(x));
    let overlap = match (like, dislike) {
        (Some(a), Some(b)) => a.intersect(&b),
        _ => None,
    };
    let combined = match (like, dislike) {
        (Some(a), Some(b)) => Some(a.span(&b)),
        (a, b) => a.or(b),
    };
    let familiar = Interval::hull(groups.watched().iter().map(|&i| x(i)))
        .map(|f| combined.map_or(f, |c| f.span(&c)))
        .or(combined);

    let split = 0.0f64.clamp(extent.lo, extent.hi);
    let (diverse_left, diverse_right) = match familiar {
        Some(f) => (
            (extent.lo < f.lo).then(|| Interval::new(extent.lo, f.lo)),
            (f.hi < extent.hi).then(|| Interval::new(f.hi, extent.hi)),
        ),
        None => (
            (extent.lo < split).then(|| Interval::new(extent.lo, split)),
            Some(Interval::new(split, extent.hi)),
        ),
    };

    let mut abs: Vec<f64> = projections.iter().map(|v| v.abs()).collect();
    let untypical_boundary = quantile(&mut abs, rho);

    let recommendable_std = match like {
        Some(r) => {
            let inside: Vec<f64> = groups
                .members(Group::Recommendable)
                .into_iter()
                .map(x)
                .filter(|&v| r.contains(v))
                .collect();
            population_std(&inside)
        }
        None => 0.0,
    };

    DimensionLayout {
        dimension,
        extent,
        like,
        dislike,
        overlap,
        combined,
        familiar,
        diverse_left,
        diverse_right,
        untypical_boundary,
        recommendable_std,
        like_center: like.map(|r| r.midpoint()),
        split,
    }
}
