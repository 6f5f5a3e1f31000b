//! Latent space built from globally-adjusted ratings, and the per-user
//! neighborhood quantities derived from it: cosine similarities, the
//! similar-user set, recommendable movies and recommendation degrees.

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::RatingDataset;
use crate::svd::{self, CsrMatrix, SvdError, SvdOptions};

/// Ratings with user and movie biases removed:
/// `r̂ = r − (a_u − A) − (a_i − B)` on rated cells, 0 elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedMatrix {
    users: usize,
    movies: usize,
    /// Per user: `(movie index, adjusted rating)` sorted by movie index.
    rows: Vec<Vec<(usize, f64)>>,
    pub user_avg: Vec<f64>,
    pub movie_avg: Vec<f64>,
    /// Mean of per-user averages over users with ratings.
    pub global_user_avg: f64,
    /// Mean of per-movie averages over movies with ratings.
    pub global_movie_avg: f64,
}

impl AdjustedMatrix {
    pub fn shape(&self) -> (usize, usize) {
        (self.users, self.movies)
    }

    /// Adjusted rating, or `None` where the user has not rated the movie.
    pub fn get(&self, user: usize, movie: usize) -> Option<f64> {
        let row = &self.rows[user];
        row.binary_search_by_key(&movie, |&(m, _)| m)
            .ok()
            .map(|p| row[p].1)
    }

    pub fn row(&self, user: usize) -> &[(usize, f64)] {
        &self.rows[user]
    }

    pub fn to_csr(&self) -> CsrMatrix {
        CsrMatrix::from_rows(self.movies, &self.rows)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        self.to_csr().to_dense()
    }
}

/// Users or movies without ratings take the global average, so their bias term is zero.
pub fn adjust_ratings(ds: &RatingDataset) -> AdjustedMatrix {
    let users = ds.user_count();
    let movies = ds.movie_count();
    let raw_user: Vec<Option<f64>> = (0..users).map(|u| ds.user_average(u)).collect();
    let raw_movie: Vec<Option<f64>> = (0..movies).map(|m| ds.movie_average(m)).collect();
    let global_user_avg = mean(raw_user.iter().flatten().copied());
    let global_movie_avg = mean(raw_movie.iter().flatten().copied());
    let user_avg: Vec<f64> = raw_user.iter().map(|a| a.unwrap_or(global_user_avg)).collect();
    let movie_avg: Vec<f64> = raw_movie.iter().map(|a| a.unwrap_or(global_movie_avg)).collect();

    let rows = (0..users)
        .map(|u| {
            ds.user_ratings(u)
                .iter()
                .map(|&(m, r)| {
                    let adj = r as f64 - (user_avg[u] - global_user_avg) - (movie_avg[m] - global_movie_avg);
                    (m, adj)
                })
                .collect()
        })
        .collect();

    AdjustedMatrix {
        users,
        movies,
        rows,
        user_avg,
        movie_avg,
        global_user_avg,
        global_movie_avg,
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FactorizeError {
    #[error("truncation rank {k} outside 1..={max}")]
    RankOutOfRange { k: usize, max: usize },
    #[error(transparent)]
    Svd(#[from] SvdError),
}

/// Truncated factorization `M ≈ U_k S_k V_kᵀ` plus user coordinates `C = M V_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentSpace {
    pub k: usize,
    /// `m × k`
    pub user_factors: Array2<f64>,
    /// Non-increasing.
    pub singular_values: Vec<f64>,
    /// `n × k`; column `p` holds every movie's position on dimension `p`.
    pub movie_factors: Array2<f64>,
    /// `m × k`
    pub user_coords: Array2<f64>,
}

impl LatentSpace {
    pub fn projection(&self, movie: usize, dimension: usize) -> f64 {
        self.movie_factors[[movie, dimension]]
    }

    pub fn dimension(&self, p: usize) -> ArrayView1<'_, f64> {
        self.movie_factors.column(p)
    }

    pub fn coords(&self, user: usize) -> ArrayView1<'_, f64> {
        self.user_coords.row(user)
    }

    pub fn user_count(&self) -> usize {
        self.user_coords.nrows()
    }

    pub fn movie_count(&self) -> usize {
        self.movie_factors.nrows()
    }

    /// Reconstruction `U_k diag(S_k) V_kᵀ`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let mut us = self.user_factors.clone();
        for (j, s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).mapv_inplace(|x| x * s);
        }
        us.dot(&self.movie_factors.t())
    }
}

pub fn factorize(adj: &AdjustedMatrix, k: usize) -> Result<LatentSpace, FactorizeError> {
    factorize_with(adj, k, &SvdOptions::default())
}

pub fn factorize_with(adj: &AdjustedMatrix, k: usize, opts: &SvdOptions) -> Result<LatentSpace, FactorizeError> {
    let (m, n) = adj.shape();
    let max = m.min(n);
    if k == 0 || k > max {
        return Err(FactorizeError::RankOutOfRange { k, max });
    }
    let csr = adj.to_csr();
    let svd = svd::truncated_svd(&csr, k, opts)?;
    let user_coords = csr.mul_dense(&svd.v);
    Ok(LatentSpace {
        k,
        user_factors: svd.u,
        singular_values: svd.s,
        movie_factors: svd.v,
        user_coords,
    })
}

/// Cosine similarity; 0 when either vector is all zero. Clamped to `[-1, 1]`.
pub fn cosine(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let na = a.dot(&a).sqrt();
    let nb = b.dot(&b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (a.dot(&b) / (na * nb)).clamp(-1.0, 1.0)
}

pub fn user_similarity(space: &LatentSpace, u: usize, v: usize) -> f64 {
    cosine(space.coords(u), space.coords(v))
}

/// Denominator used for the recommendation degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeNormalization {
    /// `Σ r_vi s_uv / Σ r_vi`
    #[default]
    RatingSum,
    /// `Σ r_vi s_uv / Σ s_uv`, a similarity-weighted mean rating.
    SimilaritySum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserNeighborhood {
    /// `None` for a user outside the factorized matrix.
    pub user: Option<usize>,
    /// `s_uv` for every user `v`.
    pub similarities: Vec<f64>,
    /// Users with `s_uv ≥ 0`, ascending.
    pub similar: Vec<usize>,
    /// Recommendable movies, ascending.
    pub recommendable: Vec<usize>,
    /// Raw degree for each entry of `recommendable`.
    pub raw_degrees: Vec<f64>,
    /// Min–max normalized degree per movie; `None` outside the recommendable list.
    pub degrees: Vec<Option<f64>>,
}

impl UserNeighborhood {
    pub fn degree(&self, movie: usize) -> Option<f64> {
        self.degrees[movie]
    }

    pub fn raw_degree(&self, movie: usize) -> Option<f64> {
        self.recommendable
            .binary_search(&movie)
            .ok()
            .map(|p| self.raw_degrees[p])
    }

    pub fn is_recommendable(&self, movie: usize) -> bool {
        self.degrees[movie].is_some()
    }
}

/// Computes `S_u`, `L_u` (using positive-rating threshold `w_c` on adjusted
/// ratings) and normalized degrees for `user`.
pub fn neighborhood(
    ds: &RatingDataset,
    adj: &AdjustedMatrix,
    space: &LatentSpace,
    user: usize,
    positive_threshold: f64,
    normalization: DegreeNormalization,
) -> UserNeighborhood {
    let mut nb = neighborhood_from(
        ds,
        adj,
        space,
        space.coords(user),
        ds.user_ratings(user),
        positive_threshold,
        normalization,
    );
    nb.user = Some(user);
    nb
}

/// Same as [`neighborhood`] for a user given only by coordinates and ratings,
/// e.g. a new user with an all-zero coordinate vector.
pub fn neighborhood_from(
    ds: &RatingDataset,
    adj: &AdjustedMatrix,
    space: &LatentSpace,
    coords: ArrayView1<f64>,
    own_ratings: &[(usize, u8)],
    positive_threshold: f64,
    normalization: DegreeNormalization,
) -> UserNeighborhood {
    let m = ds.user_count();
    let n = ds.movie_count();
    let similarities: Vec<f64> = (0..m).map(|v| cosine(coords, space.coords(v))).collect();
    let similar: Vec<usize> = (0..m).filter(|&v| similarities[v] >= 0.0).collect();
    let mut own = vec![false; n];
    for &(movie, _) in own_ratings {
        own[movie] = true;
    }

    let mut candidate = vec![false; n];
    let mut weighted = vec![0.0; n];
    let mut rating_sum = vec![0.0; n];
    let mut sim_sum = vec![0.0; n];
    for &v in &similar {
        let s = similarities[v];
        for (&(movie, r), &(_, adjusted)) in ds.user_ratings(v).iter().zip(adj.row(v)) {
            let r = r as f64;
            weighted[movie] += r * s;
            rating_sum[movie] += r;
            sim_sum[movie] += s;
            if adjusted >= positive_threshold {
                candidate[movie] = true;
            }
        }
    }

    let mut recommendable = Vec::new();
    let mut raw_degrees = Vec::new();
    for movie in 0..n {
        if !candidate[movie] || own[movie] {
            continue;
        }
        let denom = match normalization {
            DegreeNormalization::RatingSum => rating_sum[movie],
            DegreeNormalization::SimilaritySum => sim_sum[movie],
        };
        if denom == 0.0 {
            continue;
        }
        recommendable.push(movie);
        raw_degrees.push(weighted[movie] / denom);
    }

    let normalized = min_max_normalize(&raw_degrees);
    let mut degrees = vec![None; n];
    for (&movie, &d) in recommendable.iter().zip(&normalized) {
        degrees[movie] = Some(d);
    }
    UserNeighborhood {
        user: None,
        similarities,
        similar,
        recommendable,
        raw_degrees,
        degrees,
    }
}

/// Maps the minimum to 0 and the maximum to 1; a constant input maps to all 1.
pub fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // NaN bounds fall through here too
    if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return vec![1.0; values.len()];
    }
    values.iter().map(|&x| (x - lo) / (hi - lo)).collect()
}
