use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::groups::{Feedback, Group};
use super::layout::LayoutCase;
use super::model::{build_user_model, UserModel};
use crate::config::ModelParams;
use crate::dataset::RatingDataset;
use crate::latent::{neighborhood, AdjustedMatrix, LatentSpace, UserNeighborhood};

/// Degree sums over the regions of one user's best dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserValidation {
    pub user_id: u32,
    pub best_dim: usize,
    pub case: LayoutCase,
    pub sum_like: f64,
    pub sum_dislike: f64,
    pub sum_like_minus_overlap: f64,
    pub sum_dislike_minus_overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub users: usize,
    pub avg_like: f64,
    pub avg_dislike: f64,
    pub avg_like_minus_overlap: f64,
    pub avg_dislike_minus_overlap: f64,
    /// Correlation of the paired per-user sums; `None` when undefined.
    pub pearson: Option<f64>,
    pub pearson_minus_overlap: Option<f64>,
    /// Users whose best dimension is case 1, 2, 3, 4, degenerate.
    pub case_counts: [usize; 5],
}

impl ValidationSummary {
    pub fn ideal_fraction(&self) -> f64 {
        if self.users == 0 {
            return 0.0;
        }
        (self.case_counts[0] + self.case_counts[1]) as f64 / self.users as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub rows: Vec<UserValidation>,
    pub summary: ValidationSummary,
}

/// Sums normalized degrees of recommendable movies on the best dimension.
pub fn validate_user(
    user_id: u32,
    space: &LatentSpace,
    nb: &UserNeighborhood,
    model: &UserModel,
) -> UserValidation {
    let p = model.best_dimension().unwrap_or(0);
    let layout = &model.layouts[p];
    let x = space.dimension(p);
    let mut row = UserValidation {
        user_id,
        best_dim: p,
        case: layout.case(),
        sum_like: 0.0,
        sum_dislike: 0.0,
        sum_like_minus_overlap: 0.0,
        sum_dislike_minus_overlap: 0.0,
    };
    for i in model.groups.members(Group::Recommendable) {
        let b = nb.degrees[i].unwrap_or(0.0);
        let v = x[i];
        let overlap = layout.in_overlap(v);
        if layout.in_like(v) {
            row.sum_like += b;
            if !overlap {
                row.sum_like_minus_overlap += b;
            }
        }
        if layout.in_dislike(v) {
            row.sum_dislike += b;
            if !overlap {
                row.sum_dislike_minus_overlap += b;
            }
        }
    }
    row
}

/// Sample Pearson correlation; `None` for fewer than two points or zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn summarize(rows: &[UserValidation]) -> ValidationSummary {
    let col = |f: fn(&UserValidation) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let like = col(|r| r.sum_like);
    let dislike = col(|r| r.sum_dislike);
    let like_ex = col(|r| r.sum_like_minus_overlap);
    let dislike_ex = col(|r| r.sum_dislike_minus_overlap);
    let mut case_counts = [0usize; 5];
    for r in rows {
        let slot = r.case.number().map_or(4, |c| c as usize - 1);
        case_counts[slot] += 1;
    }
    ValidationSummary {
        users: rows.len(),
        avg_like: mean(like.iter().copied()),
        avg_dislike: mean(dislike.iter().copied()),
        avg_like_minus_overlap: mean(like_ex.iter().copied()),
        avg_dislike_minus_overlap: mean(dislike_ex.iter().copied()),
        pearson: pearson(&like, &dislike),
        pearson_minus_overlap: pearson(&like_ex, &dislike_ex),
        case_counts,
    }
}

/// Runs the per-user region statistics for every user, in parallel.
pub fn validate_model(
    ds: &RatingDataset,
    adj: &AdjustedMatrix,
    space: &LatentSpace,
    params: &ModelParams,
) -> ValidationReport {
    let rows: Vec<UserValidation> = (0..ds.user_count())
        .into_par_iter()
        .map(|u| {
            let nb = neighborhood(ds, adj, space, u, params.positive_rating, params.degree_normalization);
            let model = build_user_model(space, ds.user_ratings(u), &nb, &Feedback::default(), params);
            validate_user(ds.user(u).id.0, space, &nb, &model)
        })
        .collect();
    let summary = summarize(&rows);
    ValidationReport { rows, summary }
}
