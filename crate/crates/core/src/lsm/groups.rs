use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::config::Thresholds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Like,
    Dislike,
    Neutral,
    Recommendable,
    NotRecommendable,
}

impl Group {
    pub const ALL: [Group; 5] = [
        Group::Like,
        Group::Dislike,
        Group::Neutral,
        Group::Recommendable,
        Group::NotRecommendable,
    ];
}

/// Thumb feedback on movie indices plus the per-movie weights it accrues.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Feedback {
    pub up: BTreeSet<usize>,
    pub down: BTreeSet<usize>,
    pub weights: BTreeMap<usize, f64>,
}

impl Feedback {
    pub fn weight(&self, movie: usize) -> f64 {
        self.weights.get(&movie).copied().unwrap_or(1.0)
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty() && self.down.is_empty()
    }

    /// Thumbed movies with their direction, ascending by movie.
    pub fn thumbs(&self) -> impl Iterator<Item = (usize, Thumb)> + '_ {
        let ups = self.up.iter().map(|&m| (m, Thumb::Up));
        let downs = self.down.iter().map(|&m| (m, Thumb::Down));
        let mut all: Vec<_> = ups.chain(downs).collect();
        all.sort_by_key(|&(m, _)| m);
        all.into_iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Thumb {
    Up,
    Down,
}

/// Per-user partition of every movie into exactly one of five groups.
#[derive(Debug, Clone, PartialEq)]
pub struct MovieGroups {
    pub thresholds: Thresholds,
    membership: Vec<Group>,
    /// Rated movies, ascending.
    watched: Vec<usize>,
    /// Thumbed-down movies sit in the not-recommendable group but still
    /// count toward the dislike region.
    thumbed_down: BTreeSet<usize>,
}

impl MovieGroups {
    pub fn group_of(&self, movie: usize) -> Group {
        self.membership[movie]
    }

    pub fn members(&self, group: Group) -> Vec<usize> {
        (0..self.membership.len())
            .filter(|&i| self.membership[i] == group)
            .collect()
    }

    pub fn count(&self, group: Group) -> usize {
        self.membership.iter().filter(|&&g| g == group).count()
    }

    pub fn movie_count(&self) -> usize {
        self.membership.len()
    }

    pub fn watched(&self) -> &[usize] {
        &self.watched
    }

    /// Movies spanning the like region.
    pub fn like_region_members(&self) -> Vec<usize> {
        self.members(Group::Like)
    }

    /// Movies spanning the dislike region: disliked ratings plus thumbs-down.
    pub fn dislike_region_members(&self) -> Vec<usize> {
        let mut out = self.members(Group::Dislike);
        out.extend(self.thumbed_down.iter().copied());
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_recommendable(&self, movie: usize) -> bool {
        self.membership[movie] == Group::Recommendable
    }
}

/// Splits all movies into like / dislike / neutral (rated) and recommendable /
/// not recommendable (unrated). Thumbs-up moves a movie into the like group;
/// thumbs-down forces it into the not-recommendable group.
pub fn partition_groups(
    movie_count: usize,
    user_ratings: &[(usize, u8)],
    degrees: &[Option<f64>],
    feedback: &Feedback,
    thresholds: Thresholds,
) -> MovieGroups {
    let mut rating = vec![None; movie_count];
    for &(m, r) in user_ratings {
        rating[m] = Some(r as f64);
    }
    let membership = (0..movie_count)
        .map(|i| {
            if feedback.down.contains(&i) {
                return Group::NotRecommendable;
            }
            if feedback.up.contains(&i) {
                return Group::Like;
            }
            match rating[i] {
                Some(r) if r >= thresholds.like => Group::Like,
                Some(r) if r < thresholds.dislike => Group::Dislike,
                Some(_) => Group::Neutral,
                None => match degrees[i] {
                    Some(b) if b >= thresholds.recommend => Group::Recommendable,
                    _ => Group::NotRecommendable,
                },
            }
        })
        .collect();
    MovieGroups {
        thresholds,
        membership,
        watched: user_ratings.iter().map(|&(m, _)| m).collect(),
        thumbed_down: feedback.down.clone(),
    }
}

/// Threshold candidates tried in order when adapting to a user's rating
/// habits: first widen the dislike band up to `τ+`, then move both
/// thresholds together upward, then downward.
pub fn threshold_ladder(base: Thresholds) -> Vec<Thresholds> {
    let mut out = vec![base];
    let with = |like: f64, dislike: f64| Thresholds {
        like,
        dislike,
        recommend: base.recommend,
    };
    let mut d = base.dislike.floor() + 1.0;
    while d <= base.like {
        out.push(with(base.like, d));
        d += 1.0;
    }
    let mut t = base.like.floor() + 1.0;
    while t <= 5.0 {
        out.push(with(t, t));
        t += 1.0;
    }
    let mut t = base.like.ceil() - 1.0;
    while t >= 2.0 {
        out.push(with(t, t));
        t -= 1.0;
    }
    out.dedup();
    out
}
