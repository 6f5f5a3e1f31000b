//! Read-only engine shared by all sessions: dataset, adjusted ratings,
//! latent space and parameters.

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::config::{ModelParams, StoryParams};
use crate::dataset::{MovieId, RatingDataset, UserId};
use crate::error::{Error, Result};
use crate::latent::{adjust_ratings, factorize, neighborhood, neighborhood_from, AdjustedMatrix, LatentSpace, UserNeighborhood};
use crate::lsm::{build_user_model, Feedback, Group, Interval, UserModel};
use crate::snapshot::Snapshot;
use crate::story::poster_key;

#[derive(Debug, Clone)]
pub struct Engine {
    dataset: RatingDataset,
    adjusted: AdjustedMatrix,
    space: LatentSpace,
    pub model_params: ModelParams,
    pub story_params: StoryParams,
    /// Reject users absent from the dataset instead of treating them as new.
    pub strict_users: bool,
}

/// A user as seen by the engine; `index` is `None` for a user without a row
/// in the factorized matrix.
#[derive(Debug, Clone)]
pub struct UserProfile {
    pub user_id: UserId,
    pub index: Option<usize>,
    pub ratings: Vec<(usize, u8)>,
    pub neighborhood: UserNeighborhood,
}

/// Hover information for one movie.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetailView {
    pub movie_id: MovieId,
    pub title: String,
    pub genres: Vec<String>,
    pub user_rating: Option<u8>,
    pub average_rating: Option<f64>,
    pub popularity: usize,
    pub poster_key: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovieNode {
    pub movie_id: MovieId,
    pub title: String,
    pub position: f64,
    pub group: Group,
    pub degree: Option<f64>,
}

/// One dimension as the user's model sees it, with every movie's position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionView {
    pub dimension: usize,
    pub extent: Interval,
    pub like: Option<Interval>,
    pub dislike: Option<Interval>,
    pub overlap: Option<Interval>,
    pub familiar: Option<Interval>,
    pub diverse_left: Option<Interval>,
    pub diverse_right: Option<Interval>,
    pub untypical_boundary: f64,
    pub like_center: Option<f64>,
    pub suitability: f64,
    pub interactive: f64,
    pub nodes: Vec<MovieNode>,
}

/// Display colors for the movie groups.
pub const GROUP_COLORS: [(Group, &str); 5] = [
    (Group::Like, "green"),
    (Group::Dislike, "orange"),
    (Group::Neutral, "gray"),
    (Group::Recommendable, "blue"),
    (Group::NotRecommendable, "lightgray"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatedMovie {
    pub movie_id: MovieId,
    pub title: String,
    pub rating: u8,
    pub genres: Vec<String>,
}

impl Engine {
    /// Adjusts ratings and factorizes with `model_params.k`.
    pub fn build(dataset: RatingDataset, model_params: ModelParams, story_params: StoryParams) -> Result<Engine> {
        model_params.validate()?;
        story_params.validate()?;
        let adjusted = adjust_ratings(&dataset);
        let space = factorize(&adjusted, model_params.k)?;
        Ok(Engine {
            dataset,
            adjusted,
            space,
            model_params,
            story_params,
            strict_users: true,
        })
    }

    /// Rebuilds from a snapshot; only the adjusted ratings are recomputed.
    pub fn from_snapshot(snapshot: Snapshot, story_params: StoryParams) -> Result<Engine> {
        Self::from_parts(snapshot.dataset, snapshot.space, snapshot.params, story_params)
    }

    pub fn from_parts(
        dataset: RatingDataset,
        space: LatentSpace,
        model_params: ModelParams,
        story_params: StoryParams,
    ) -> Result<Engine> {
        model_params.validate()?;
        story_params.validate()?;
        let adjusted = adjust_ratings(&dataset);
        Ok(Engine {
            dataset,
            adjusted,
            space,
            model_params,
            story_params,
            strict_users: true,
        })
    }

    pub fn dataset(&self) -> &RatingDataset {
        &self.dataset
    }

    pub fn adjusted(&self) -> &AdjustedMatrix {
        &self.adjusted
    }

    pub fn space(&self) -> &LatentSpace {
        &self.space
    }

    pub fn movie_index(&self, id: MovieId) -> Result<usize> {
        self.dataset.movie_idx(id).ok_or(Error::UnknownMovie(id.0))
    }

    /// Known users get their neighborhood from the factorized matrix; unknown
    /// ones (outside strict mode) start with no ratings and zero coordinates.
    pub fn profile(&self, user_id: UserId) -> Result<UserProfile> {
        let p = &self.model_params;
        match self.dataset.user_idx(user_id) {
            Some(u) => Ok(UserProfile {
                user_id,
                index: Some(u),
                ratings: self.dataset.user_ratings(u).to_vec(),
                neighborhood: neighborhood(&self.dataset, &self.adjusted, &self.space, u, p.positive_rating, p.degree_normalization),
            }),
            None if self.strict_users => Err(Error::UnknownUser(user_id.0)),
            None => Ok(self.new_user_profile(user_id)),
        }
    }

    pub fn new_user_profile(&self, user_id: UserId) -> UserProfile {
        let p = &self.model_params;
        let coords = Array1::zeros(self.space.k);
        UserProfile {
            user_id,
            index: None,
            ratings: Vec::new(),
            neighborhood: neighborhood_from(
                &self.dataset,
                &self.adjusted,
                &self.space,
                coords.view(),
                &[],
                p.positive_rating,
                p.degree_normalization,
            ),
        }
    }

    pub fn user_model(&self, profile: &UserProfile, feedback: &Feedback) -> UserModel {
        build_user_model(&self.space, &profile.ratings, &profile.neighborhood, feedback, &self.model_params)
    }

    /// `user_rating` is `None` when the user has not rated the movie. An
    /// unknown user is an error only in strict mode.
    pub fn movie_details(&self, movie_id: MovieId, user_id: Option<UserId>) -> Result<DetailView> {
        let m = self.movie_index(movie_id)?;
        let rec = self.dataset.movie(m);
        let user = match user_id {
            Some(u) => match self.dataset.user_idx(u) {
                Some(idx) => Some(idx),
                None if self.strict_users => return Err(Error::UnknownUser(u.0)),
                None => None,
            },
            None => None,
        };
        let user_rating = user.and_then(|u| self.dataset.rating(u, m));
        Ok(DetailView {
            movie_id,
            title: rec.title.clone(),
            genres: rec.genres.clone(),
            user_rating,
            average_rating: self.dataset.movie_average(m),
            popularity: self.dataset.popularity(m),
            poster_key: poster_key(movie_id),
        })
    }

    pub fn history(&self, user_id: UserId) -> Result<Vec<RatedMovie>> {
        let u = self.dataset.user_idx(user_id).ok_or(Error::UnknownUser(user_id.0))?;
        Ok(self
            .dataset
            .user_ratings(u)
            .iter()
            .map(|&(m, rating)| {
                let rec = self.dataset.movie(m);
                RatedMovie {
                    movie_id: rec.id,
                    title: rec.title.clone(),
                    rating,
                    genres: rec.genres.clone(),
                }
            })
            .collect())
    }

    pub fn dimension_view(&self, profile: &UserProfile, model: &UserModel, dimension: usize) -> Result<DimensionView> {
        if dimension >= self.space.k {
            return Err(Error::UnknownDimension {
                dimension,
                k: self.space.k,
            });
        }
        let layout = &model.layouts[dimension];
        let score = model.scores[dimension];
        let x = self.space.dimension(dimension);
        let nodes = (0..self.dataset.movie_count())
            .map(|i| {
                let rec = self.dataset.movie(i);
                MovieNode {
                    movie_id: rec.id,
                    title: rec.title.clone(),
                    position: x[i],
                    group: model.groups.group_of(i),
                    degree: profile.neighborhood.degree(i),
                }
            })
            .collect();
        Ok(DimensionView {
            dimension,
            extent: layout.extent,
            like: layout.like,
            dislike: layout.dislike,
            overlap: layout.overlap,
            familiar: layout.familiar,
            diverse_left: layout.diverse_left,
            diverse_right: layout.diverse_right,
            untypical_boundary: layout.untypical_boundary,
            like_center: layout.like_center,
            suitability: score.suitability,
            interactive: score.interactive,
            nodes,
        })
    }
}
