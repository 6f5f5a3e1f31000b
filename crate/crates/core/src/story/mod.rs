//! Recommendation stories: a narrative structure over two semantic zones of
//! one latent dimension, filled with recommendable movies picked around
//! random locations and steered toward the user's preference targets.

pub mod anchors;
pub mod select;
pub mod structure;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use anchors::{anchor_examples, assign_roles, similar_liked, AnchorCandidate, Role};
pub use select::{admission_gap, admit_candidate, familiarity, thumb_factor, typicality, Selector};
pub use structure::{candidate_structures, choose_structure, sample_counts, Preferences, StructureKind};

use crate::config::{StoryParams, Thresholds};
use crate::dataset::{MovieId, RatingDataset};
use crate::latent::LatentSpace;
use crate::lsm::{
    DimensionLayout, DimensionScore, FamiliarityZone, Feedback, Group, Interval, TypicalityZone, UserModel,
};

/// Movies considered for anchors when the user has rated fewer than two.
const POPULAR_ANCHOR_POOL: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StoryError {
    #[error("preference {name} = {value} is outside [0, 1]")]
    InvalidPreference { name: &'static str, value: f64 },
    #[error("no latent dimension available for a story")]
    NoDimensions,
    #[error("recommendable pool exhausted on all {dimensions} candidate dimensions")]
    PoolExhausted { dimensions: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneKind {
    Familiar,
    DiverseLeft,
    DiverseRight,
    TypicalLeft,
    Untypical,
    TypicalRight,
}

impl ZoneKind {
    pub fn contains(&self, layout: &DimensionLayout, x: f64) -> bool {
        match self {
            ZoneKind::Familiar => layout.familiarity_zone(x) == FamiliarityZone::Familiar,
            ZoneKind::DiverseLeft => layout.familiarity_zone(x) == FamiliarityZone::DiverseLeft,
            ZoneKind::DiverseRight => layout.familiarity_zone(x) == FamiliarityZone::DiverseRight,
            ZoneKind::TypicalLeft => layout.typicality_zone(x) == TypicalityZone::TypicalLeft,
            ZoneKind::Untypical => layout.typicality_zone(x) == TypicalityZone::Untypical,
            ZoneKind::TypicalRight => layout.typicality_zone(x) == TypicalityZone::TypicalRight,
        }
    }

    pub fn interval(&self, layout: &DimensionLayout) -> Option<Interval> {
        match self {
            ZoneKind::Familiar => layout.familiar,
            ZoneKind::DiverseLeft => layout.diverse_left,
            ZoneKind::DiverseRight => layout.diverse_right,
            ZoneKind::TypicalLeft => layout.typical_left(),
            ZoneKind::Untypical => layout.untypical(),
            ZoneKind::TypicalRight => layout.typical_right(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZonePlan {
    pub kind: ZoneKind,
    pub interval: Interval,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub movie_id: MovieId,
    pub title: String,
    pub poster_key: String,
    pub projection: f64,
    /// `None` for a popular movie standing in for a user without ratings.
    pub rating: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarMovie {
    pub movie_id: MovieId,
    pub title: String,
    pub projection: f64,
    pub distance: f64,
    pub genres: Vec<String>,
    pub shared_genres: Vec<String>,
}

/// Placement on the dimension axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level1 {
    pub position: f64,
    pub group: Group,
    pub familiarity: FamiliarityZone,
    pub typicality: TypicalityZone,
    pub genres: Vec<String>,
}

/// Height on the panel: the normalized recommendation degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level2 {
    pub degree: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level3 {
    pub similar_liked: Vec<SimilarMovie>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryEvent {
    pub movie_id: MovieId,
    pub title: String,
    pub poster_key: String,
    pub projection: f64,
    pub degree: f64,
    pub roles: Vec<Role>,
    pub zone: ZoneKind,
    pub similar_liked: Vec<MovieId>,
    pub level1: Level1,
    pub level2: Level2,
    pub level3: Level3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Story {
    pub dimension: usize,
    pub structure: StructureKind,
    pub seed: u64,
    pub anchor_left: Anchor,
    pub anchor_right: Anchor,
    pub layout: DimensionLayout,
    pub score: DimensionScore,
    /// Zones in traversal order.
    pub zones: [ZonePlan; 2],
    /// Events ordered along the traversal.
    pub events: Vec<StoryEvent>,
    /// Traversal runs toward larger projections.
    pub ascending: bool,
    /// Counts were shifted between zones because one ran dry.
    pub rebalanced: bool,
    /// Position of `dimension` in the model's dimension selection; `None`
    /// when no selected dimension could hold the story.
    pub rotation_index: Option<usize>,
    pub thresholds: Thresholds,
}

pub fn poster_key(id: MovieId) -> String {
    format!("movie-{}", id.0)
}

/// Everything a story is generated from.
pub struct StoryInput<'a> {
    pub dataset: &'a RatingDataset,
    pub space: &'a LatentSpace,
    pub model: &'a UserModel,
    /// Normalized recommendation degrees per movie.
    pub degrees: &'a [Option<f64>],
    /// The user's own ratings.
    pub ratings: &'a [(usize, u8)],
    pub feedback: &'a Feedback,
    pub preferences: Preferences,
    pub params: &'a StoryParams,
    /// Selection position to start looking for a dimension at.
    pub rotation: usize,
    /// Dimension of the previous story; tried last when others exist.
    pub avoid: Option<usize>,
    pub seed: u64,
}

struct Plan {
    zones: [ZonePlan; 2],
    pools: [Vec<usize>; 2],
    rebalanced: bool,
}

fn diverse_options(layout: &DimensionLayout) -> Vec<ZoneKind> {
    let c = select::familiarity_center(layout);
    let left = layout.familiar.map_or(f64::INFINITY, |f| c - f.lo);
    let right = layout.familiar.map_or(f64::INFINITY, |f| f.hi - c);
    if right < left {
        vec![ZoneKind::DiverseRight, ZoneKind::DiverseLeft]
    } else {
        vec![ZoneKind::DiverseLeft, ZoneKind::DiverseRight]
    }
}

fn typical_options(layout: &DimensionLayout) -> Vec<ZoneKind> {
    if layout.like_center.unwrap_or(0.0) < 0.0 {
        vec![ZoneKind::TypicalLeft, ZoneKind::TypicalRight]
    } else {
        vec![ZoneKind::TypicalRight, ZoneKind::TypicalLeft]
    }
}

/// With `f = 1` every movie must come from the familiar zone, whatever the structure.
fn familiar_filter(kind: StructureKind, prefs: Preferences, layout: &DimensionLayout, x: f64) -> bool {
    kind.is_familiarity() || prefs.familiar < 1.0 || layout.familiarity_zone(x) == FamiliarityZone::Familiar
}

fn plan_dimension(
    input: &StoryInput,
    layout: &DimensionLayout,
    kind: StructureKind,
    counts: (usize, usize),
    allow_rebalance: bool,
) -> Option<Plan> {
    let x = input.space.dimension(layout.dimension);
    let recommendable = input.model.groups.members(Group::Recommendable);
    let pool = |zone: ZoneKind| -> Vec<usize> {
        recommendable
            .iter()
            .copied()
            .filter(|&i| zone.contains(layout, x[i]) && familiar_filter(kind, input.preferences, layout, x[i]))
            .collect()
    };
    let (primaries, secondaries) = if kind.is_familiarity() {
        (vec![ZoneKind::Familiar], diverse_options(layout))
    } else {
        (typical_options(layout), vec![ZoneKind::Untypical])
    };
    let total = counts.0 + counts.1;
    for &pz in &primaries {
        for &sz in &secondaries {
            // A zone without extent holds no movies but can still serve a zero count.
            let pi = pz.interval(layout).unwrap_or(layout.extent);
            let si = sz.interval(layout).unwrap_or(layout.extent);
            let (pp, sp) = (pool(pz), pool(sz));
            let (mut a, mut b) = counts;
            let mut rebalanced = false;
            if pp.len() < a || sp.len() < b {
                if !allow_rebalance || pp.len() + sp.len() < total {
                    continue;
                }
                a = a.min(pp.len());
                b = total - a;
                if b > sp.len() {
                    b = sp.len();
                    a = total - b;
                }
                rebalanced = true;
            }
            return Some(order_plan(
                kind,
                [
                    ZonePlan { kind: pz, interval: pi, count: a },
                    ZonePlan { kind: sz, interval: si, count: b },
                ],
                [pp, sp],
                rebalanced,
            ));
        }
    }
    None
}

/// Puts the starting zone first.
fn order_plan(kind: StructureKind, zones: [ZonePlan; 2], pools: [Vec<usize>; 2], rebalanced: bool) -> Plan {
    let [pz, sz] = zones;
    let [pp, sp] = pools;
    if kind.starts_primary() {
        Plan { zones: [pz, sz], pools: [pp, sp], rebalanced }
    } else {
        Plan { zones: [sz, pz], pools: [sp, pp], rebalanced }
    }
}

fn anchor_candidates(input: &StoryInput, dimension: usize) -> Vec<AnchorCandidate> {
    let x = input.space.dimension(dimension);
    let ds = input.dataset;
    if input.ratings.len() >= 2 {
        return input
            .ratings
            .iter()
            .map(|&(movie, rating)| AnchorCandidate {
                movie,
                x: x[movie],
                rating,
                popularity: ds.popularity(movie),
            })
            .collect();
    }
    let mut popular: Vec<usize> = (0..ds.movie_count()).collect();
    popular.sort_by(|&a, &b| ds.popularity(b).cmp(&ds.popularity(a)).then(a.cmp(&b)));
    popular.truncate(POPULAR_ANCHOR_POOL);
    popular
        .into_iter()
        .map(|movie| AnchorCandidate {
            movie,
            x: x[movie],
            rating: 0,
            popularity: ds.popularity(movie),
        })
        .collect()
}

fn make_anchor(input: &StoryInput, c: AnchorCandidate) -> Anchor {
    let rec = input.dataset.movie(c.movie);
    Anchor {
        movie_id: rec.id,
        title: rec.title.clone(),
        poster_key: poster_key(rec.id),
        projection: c.x,
        rating: (c.rating > 0).then_some(c.rating),
    }
}

fn fill_zones<R: rand::Rng>(input: &StoryInput, layout: &DimensionLayout, kind: StructureKind, plan: &Plan, rng: &mut R) -> Vec<usize> {
    let x = input.space.dimension(layout.dimension);
    let selector = Selector {
        x,
        degrees: input.degrees,
        feedback: input.feedback,
        extent: layout.extent,
        params: input.params,
    };
    let (attribute, target): (fn(&DimensionLayout, f64) -> f64, f64) = if kind.is_familiarity() {
        (typicality, input.preferences.typical)
    } else {
        (familiarity, input.preferences.familiar)
    };
    let mut chosen: Vec<usize> = Vec::new();
    let mut attrs: Vec<f64> = Vec::new();
    for (zone, pool) in plan.zones.iter().zip(&plan.pools) {
        let mut remaining = pool.clone();
        for _ in 0..zone.count {
            let mut best: Option<(usize, f64)> = None;
            let mut pick = None;
            for _ in 0..input.params.max_retries.max(1) {
                let Some(c) = selector.select_movie(zone.interval, &remaining, rng) else {
                    break;
                };
                let a = attribute(layout, x[c]);
                if admit_candidate(&attrs, a, target) {
                    pick = Some(c);
                    break;
                }
                let gap = admission_gap(&attrs, a, target);
                if best.is_none_or(|(_, g)| gap < g) {
                    best = Some((c, gap));
                }
            }
            let Some(c) = pick.or(best.map(|b| b.0)) else {
                break;
            };
            remaining.retain(|&i| i != c);
            attrs.push(attribute(layout, x[c]));
            chosen.push(c);
        }
    }
    chosen
}

fn build_event(input: &StoryInput, layout: &DimensionLayout, zone: ZoneKind, movie: usize) -> StoryEvent {
    let ds = input.dataset;
    let x = input.space.dimension(layout.dimension);
    let v = x[movie];
    let rec = ds.movie(movie);
    let liked = input.model.groups.like_region_members();
    let similar = similar_liked(v, x, &liked, input.params.similar_liked);
    let radius = input.params.thumb_radius_frac * layout.extent.len();
    let roles = assign_roles(layout, v, similar.first().map(|s| s.1), radius);
    let degree = input.degrees[movie].unwrap_or(0.0);
    let similar_movies: Vec<SimilarMovie> = similar
        .iter()
        .map(|&(j, d)| {
            let other = ds.movie(j);
            SimilarMovie {
                movie_id: other.id,
                title: other.title.clone(),
                projection: x[j],
                distance: d,
                genres: other.genres.clone(),
                shared_genres: other.genres.iter().filter(|g| rec.genres.contains(g)).cloned().collect(),
            }
        })
        .collect();
    StoryEvent {
        movie_id: rec.id,
        title: rec.title.clone(),
        poster_key: poster_key(rec.id),
        projection: v,
        degree,
        roles,
        zone,
        similar_liked: similar_movies.iter().map(|s| s.movie_id).collect(),
        level1: Level1 {
            position: v,
            group: input.model.groups.group_of(movie),
            familiarity: layout.familiarity_zone(v),
            typicality: layout.typicality_zone(v),
            genres: rec.genres.clone(),
        },
        level2: Level2 {
            degree,
            height: degree,
        },
        level3: Level3 {
            similar_liked: similar_movies,
        },
    }
}

/// Generates one story. Dimensions are tried in selection order starting at
/// `input.rotation`, then the unselected ones by `D′_v`; the first whose
/// zones can hold the planned counts (and that has two distinct anchors) is
/// used. If none can, counts are shifted between zones on the first
/// dimension that can hold the story at all.
pub fn generate_story(input: &StoryInput) -> Result<Story, StoryError> {
    input.preferences.check()?;
    let dims = &input.model.selection.dimensions;
    if dims.is_empty() {
        return Err(StoryError::NoDimensions);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(input.seed);
    let kind = choose_structure(input.preferences, &mut rng)?;
    let counts = sample_counts(input.preferences, input.params.length, kind);

    // Selected dimensions in rotation order, then the rest by interactive score.
    let mut order: Vec<(Option<usize>, usize)> = (0..dims.len())
        .map(|k| (input.rotation + k) % dims.len())
        .map(|pos| (Some(pos), dims[pos]))
        .collect();
    order.extend(
        input
            .model
            .ranking(true)
            .into_iter()
            .filter(|p| !dims.contains(p))
            .map(|p| (None, p)),
    );
    if let Some(prev) = input.avoid {
        // stable: keeps everything else in place
        order.sort_by_key(|&(_, p)| p == prev);
    }
    let mut found = None;
    'passes: for allow_rebalance in [false, true] {
        for &(pos, p) in &order {
            let layout = &input.model.layouts[p];
            let Some(anchors) = anchor_examples(&anchor_candidates(input, p)) else {
                continue;
            };
            if let Some(plan) = plan_dimension(input, layout, kind, counts, allow_rebalance) {
                found = Some((pos, p, anchors, plan));
                break 'passes;
            }
        }
    }
    let Some((rotation_index, p, (left, right), plan)) = found else {
        return Err(StoryError::PoolExhausted { dimensions: order.len() });
    };
    let layout = &input.model.layouts[p];
    let mut picked = fill_zones(input, layout, kind, &plan, &mut rng);
    if picked.len() < input.params.length {
        return Err(StoryError::PoolExhausted { dimensions: order.len() });
    }

    let x = input.space.dimension(p);
    let ascending = plan.zones[0].interval.midpoint() <= plan.zones[1].interval.midpoint();
    picked.sort_by(|&a, &b| {
        let o = x[a].total_cmp(&x[b]).then(a.cmp(&b));
        if ascending {
            o
        } else {
            o.reverse()
        }
    });
    let events = picked
        .into_iter()
        .map(|i| {
            let zone = if plan.zones[0].kind.contains(layout, x[i]) {
                plan.zones[0].kind
            } else {
                plan.zones[1].kind
            };
            build_event(input, layout, zone, i)
        })
        .collect();

    Ok(Story {
        dimension: p,
        structure: kind,
        seed: input.seed,
        anchor_left: make_anchor(input, left),
        anchor_right: make_anchor(input, right),
        layout: layout.clone(),
        score: input.model.scores[p],
        zones: plan.zones,
        events,
        ascending,
        rebalanced: plan.rebalanced,
        rotation_index,
        thresholds: input.model.thresholds,
    })
}
