//! Engine-versus-oracle comparisons on the pinned fixtures, shared by the
//! oracle tests and the acceptance suite.
#![allow(dead_code, clippy::needless_range_loop)]

use crate::oracle::{self, Dense, FIVE_USERS, PINNED};
use storyrec_core::config::{ModelParams, Thresholds};
use storyrec_core::latent::{adjust_ratings, factorize, neighborhood, AdjustedMatrix, LatentSpace};
use storyrec_core::lsm::{
    dimension_disagreement, interactive_score, layout_dimension, partition_groups, score_dimension, validate_model,
    Feedback, ScoreWeights,
};
use storyrec_core::RatingDataset;

pub const TOL: f64 = 1e-9;

pub struct Built {
    pub ds: RatingDataset,
    pub adj: AdjustedMatrix,
    pub space: LatentSpace,
    pub dense: Dense,
    pub oracle_adj: oracle::Adjusted,
}

pub fn build(triples: &[(u32, u32, u8)], k: usize) -> Built {
    let ds = RatingDataset::from_triples(triples).unwrap();
    let adj = adjust_ratings(&ds);
    let space = factorize(&adj, k).unwrap();
    let dense = Dense::from_triples(triples);
    let oracle_adj = oracle::adjust(&dense);
    Built {
        ds,
        adj,
        space,
        dense,
        oracle_adj,
    }
}

pub fn engine_v(space: &LatentSpace) -> Vec<Vec<f64>> {
    space.movie_factors.rows().into_iter().map(|r| r.to_vec()).collect()
}

pub fn column(space: &LatentSpace, p: usize) -> Vec<f64> {
    space.dimension(p).to_vec()
}

pub fn check_adjustment(b: &Built) -> Result<(), String> {
    for u in 0..b.dense.m() {
        for i in 0..b.dense.n() {
            let engine = b.adj.get(u, i);
            let want = (b.dense.r[u][i] != 0).then_some(b.oracle_adj.values[u][i]);
            match (engine, want) {
                (Some(e), Some(w)) if oracle::rel_close(e, w, TOL) => {}
                (None, None) => {}
                other => return Err(format!("adjusted ({u},{i}): {other:?}")),
            }
        }
    }
    if !oracle::rel_close(b.adj.global_user_avg, b.oracle_adj.big_a, TOL)
        || !oracle::rel_close(b.adj.global_movie_avg, b.oracle_adj.big_b, TOL)
    {
        return Err("global averages differ".into());
    }
    Ok(())
}

/// Similarities, recommendable lists and raw and normalized degrees for every user.
pub fn check_neighborhoods(b: &Built, w_c: f64) -> Result<(), String> {
    let c = oracle::coords(&b.oracle_adj.values, &engine_v(&b.space));
    for u in 0..b.dense.m() {
        let nb = neighborhood(&b.ds, &b.adj, &b.space, u, w_c, Default::default());
        let sims = oracle::similarities(&c, &c[u]);
        for v in 0..b.dense.m() {
            if !oracle::rel_close(nb.similarities[v], sims[v], TOL) {
                return Err(format!("s({u},{v}) = {} vs {}", nb.similarities[v], sims[v]));
            }
        }
        let similar: Vec<usize> = (0..b.dense.m()).filter(|&v| sims[v] >= 0.0).collect();
        if nb.similar != similar {
            return Err(format!("S_{u}: {:?} vs {similar:?}", nb.similar));
        }
        let list = oracle::recommendable(&b.dense, &b.oracle_adj, &sims, &b.dense.rated(u), w_c);
        if nb.recommendable != list {
            return Err(format!("L_{u}: {:?} vs {list:?}", nb.recommendable));
        }
        let raw: Vec<f64> = list.iter().map(|&i| oracle::raw_degree(&b.dense, &sims, i)).collect();
        for (j, &i) in list.iter().enumerate() {
            if !oracle::rel_close(nb.raw_degrees[j], raw[j], TOL) {
                return Err(format!("raw b({u},{i}) = {} vs {}", nb.raw_degrees[j], raw[j]));
            }
        }
        for (j, &i) in list.iter().enumerate() {
            let norm = oracle::min_max(&raw)[j];
            if !nb.degree(i).is_some_and(|d| (d - norm).abs() < 1e-9) {
                return Err(format!("normalized b({u},{i}) = {:?} vs {norm}", nb.degree(i)));
            }
        }
    }
    Ok(())
}

pub fn feedback(up: &[usize], down: &[usize]) -> Feedback {
    let mut fb = Feedback::default();
    for &i in up {
        fb.up.insert(i);
        fb.weights.insert(i, 2.0);
    }
    for &i in down {
        fb.down.insert(i);
        fb.weights.insert(i, 4.0);
    }
    fb
}

/// Scores, pairwise disagreements and thumb adjustments on every dimension.
pub fn check_dimensions(b: &Built, u: usize, up: &[usize], down: &[usize]) -> Result<(), String> {
    let params = ModelParams::default();
    let t = Thresholds::VALIDATION;
    let nb = neighborhood(&b.ds, &b.adj, &b.space, u, params.positive_rating, params.degree_normalization);
    let fb = feedback(up, down);
    let groups = partition_groups(b.ds.movie_count(), b.ds.user_ratings(u), &nb.degrees, &fb, t);
    let og = oracle::groups(&b.dense.r[u], &nb.degrees, up, down, t.like, t.dislike, t.recommend);
    let w = ScoreWeights::default();
    let layouts: Vec<_> = (0..b.space.k)
        .map(|p| layout_dimension(p, b.space.dimension(p), &groups, params.rho))
        .collect();
    let weight = |i: usize| fb.weight(i);
    for p in 0..b.space.k {
        let x = column(&b.space, p);
        let d_v = score_dimension(&layouts[p], &w);
        let want = oracle::suitability(&x, &og, w.plus, w.overlap, w.theta);
        if !oracle::rel_close(d_v, want, TOL) {
            return Err(format!("D_v({p}) = {d_v} vs {want}"));
        }
        let d_int = interactive_score(d_v, &layouts[p], b.space.dimension(p), &fb, &nb.degrees, params.w_interactive);
        let want_int = oracle::interactive(want, &x, &og, up, down, &nb.degrees, params.w_interactive);
        if !oracle::rel_close(d_int, want_int, TOL) {
            return Err(format!("D'_v({p}) = {d_int} vs {want_int}"));
        }
        for q in 0..b.space.k {
            let xq = column(&b.space, q);
            let d_s = dimension_disagreement(
                &layouts[p],
                b.space.dimension(p),
                &layouts[q],
                b.space.dimension(q),
                &nb.recommendable,
                &fb,
            );
            let want_s = oracle::disagreement(&x, &xq, &og, &nb.recommendable, weight);
            if !oracle::rel_close(d_s, want_s, TOL) {
                return Err(format!("D_s({p},{q}) = {d_s} vs {want_s}"));
            }
        }
    }
    Ok(())
}

/// Every pinned comparison: adjustments, neighbourhoods at two cut-offs,
/// dimension scores with and without thumbs, and the region sums.
pub fn run_pinned() -> Result<(), String> {
    let b = build(PINNED, 4);
    check_adjustment(&b)?;
    check_neighborhoods(&b, 3.0)?;
    check_neighborhoods(&b, 0.0)?;
    for u in 0..b.dense.m() {
        check_dimensions(&b, u, &[], &[])?;
        let unrated: Vec<usize> = (0..b.dense.n()).filter(|&i| b.dense.r[u][i] == 0).collect();
        let rated = b.dense.rated(u);
        check_dimensions(&b, u, &unrated[..1], &rated[..1])?;
        check_dimensions(&b, u, &rated[1..2], &unrated[unrated.len() - 1..])?;
    }
    check_region_sums()
}

/// Validation rows on the five-user fixture against looped region sums.
pub fn check_region_sums() -> Result<(), String> {
    let b = build(FIVE_USERS, 4);
    let params = ModelParams {
        k: 4,
        adaptive_thresholds: false,
        ..ModelParams::default()
    };
    let report = validate_model(&b.ds, &b.adj, &b.space, &params);
    if report.rows.len() != 5 {
        return Err(format!("{} validation rows", report.rows.len()));
    }
    let t = params.thresholds;
    for (u, row) in report.rows.iter().enumerate() {
        let nb = neighborhood(&b.ds, &b.adj, &b.space, u, params.positive_rating, params.degree_normalization);
        let og = oracle::groups(&b.dense.r[u], &nb.degrees, &[], &[], t.like, t.dislike, t.recommend);
        let scores: Vec<f64> = (0..4)
            .map(|p| oracle::suitability(&column(&b.space, p), &og, 5.0, 10.0, 10.0))
            .collect();
        let best = (0..4).fold(0, |best, p| if scores[p] > scores[best] { p } else { best });
        if row.user_id != b.dense.users[u] || row.best_dim != best {
            return Err(format!("user {}: best dimension {} vs {best}", row.user_id, row.best_dim));
        }
        let sums = oracle::region_sums(&column(&b.space, best), &og, &nb.degrees);
        let got = [row.sum_like, row.sum_dislike, row.sum_like_minus_overlap, row.sum_dislike_minus_overlap];
        if got.iter().zip(sums).any(|(g, w)| !oracle::rel_close(*g, w, TOL)) {
            return Err(format!("user {}: {got:?} vs {sums:?}", row.user_id));
        }
    }
    Ok(())
}
