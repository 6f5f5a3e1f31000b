//! Straight-loop reference implementations and shared fixtures for the
//! integration and acceptance tests. Nothing here calls into the engine's
//! numerics; indices follow the order of first appearance in the triples,
//! the same convention as `RatingDataset::from_triples`.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Six users, eight movies, sparse enough that several dimensions score
/// above zero with partial like/dislike overlap.
pub const PINNED: &[(u32, u32, u8)] = &[
    (1, 1, 5), (1, 2, 4), (1, 4, 3), (1, 5, 1), (1, 8, 1),
    (2, 1, 1), (2, 2, 4), (2, 3, 5), (2, 4, 3), (2, 5, 2),
    (3, 1, 4), (3, 3, 4), (3, 4, 3), (3, 7, 1), (3, 8, 4),
    (4, 2, 3), (4, 4, 1), (4, 5, 3), (4, 7, 1), (4, 8, 3),
    (5, 1, 2), (5, 2, 4), (5, 4, 1), (5, 5, 2), (5, 6, 5), (5, 7, 4), (5, 8, 4),
    (6, 1, 4), (6, 2, 1), (6, 6, 5), (6, 7, 1), (6, 8, 4),
];

/// Five users over ten movies for the region-sum statistics.
pub const FIVE_USERS: &[(u32, u32, u8)] = &[
    (1, 1, 3), (1, 2, 5), (1, 3, 2), (1, 4, 4), (1, 5, 4), (1, 6, 3), (1, 7, 1), (1, 9, 1),
    (2, 1, 1), (2, 3, 1), (2, 4, 5), (2, 8, 3), (2, 9, 5), (2, 10, 2),
    (3, 1, 4), (3, 2, 3), (3, 3, 5), (3, 5, 4), (3, 6, 5), (3, 7, 1), (3, 9, 3), (3, 10, 1),
    (4, 1, 4), (4, 2, 5), (4, 5, 3), (4, 6, 1), (4, 7, 1), (4, 8, 1), (4, 9, 2), (4, 10, 2),
    (5, 1, 2), (5, 3, 1), (5, 6, 4), (5, 7, 2), (5, 9, 2),
];

/// Three users, three movies.
pub const TOY: &[(u32, u32, u8)] = &[(1, 1, 5), (1, 2, 1), (2, 1, 4), (2, 2, 2), (2, 3, 5), (3, 3, 4)];

/// Dense rating table, 0 for unrated.
#[derive(Debug, Clone)]
pub struct Dense {
    pub users: Vec<u32>,
    pub movies: Vec<u32>,
    pub r: Vec<Vec<u8>>,
}

impl Dense {
    pub fn from_triples(triples: &[(u32, u32, u8)]) -> Dense {
        let mut users = Vec::new();
        let mut movies = Vec::new();
        for &(u, m, _) in triples {
            if !users.contains(&u) {
                users.push(u);
            }
            if !movies.contains(&m) {
                movies.push(m);
            }
        }
        let mut r = vec![vec![0u8; movies.len()]; users.len()];
        for &(u, m, v) in triples {
            let ui = users.iter().position(|&x| x == u).unwrap();
            let mi = movies.iter().position(|&x| x == m).unwrap();
            r[ui][mi] = v;
        }
        Dense { users, movies, r }
    }

    pub fn m(&self) -> usize {
        self.users.len()
    }

    pub fn n(&self) -> usize {
        self.movies.len()
    }

    pub fn rated(&self, u: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.r[u][i] != 0).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Adjusted {
    pub a_user: Vec<f64>,
    pub a_movie: Vec<f64>,
    pub big_a: f64,
    pub big_b: f64,
    /// 0 where unrated.
    pub values: Vec<Vec<f64>>,
}

pub fn adjust(d: &Dense) -> Adjusted {
    let avg = |cells: Vec<u8>| -> Option<f64> {
        let rated: Vec<f64> = cells.into_iter().filter(|&c| c != 0).map(f64::from).collect();
        (!rated.is_empty()).then(|| rated.iter().sum::<f64>() / rated.len() as f64)
    };
    let users: Vec<Option<f64>> = (0..d.m()).map(|u| avg(d.r[u].clone())).collect();
    let movies: Vec<Option<f64>> = (0..d.n()).map(|i| avg((0..d.m()).map(|u| d.r[u][i]).collect())).collect();
    let mean_of = |xs: &[Option<f64>]| {
        let v: Vec<f64> = xs.iter().flatten().copied().collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let big_a = mean_of(&users);
    let big_b = mean_of(&movies);
    let a_user: Vec<f64> = users.iter().map(|a| a.unwrap_or(big_a)).collect();
    let a_movie: Vec<f64> = movies.iter().map(|a| a.unwrap_or(big_b)).collect();
    let mut values = vec![vec![0.0; d.n()]; d.m()];
    for u in 0..d.m() {
        for i in 0..d.n() {
            if d.r[u][i] != 0 {
                values[u][i] = d.r[u][i] as f64 - (a_user[u] - big_a) - (a_movie[i] - big_b);
            }
        }
    }
    Adjusted {
        a_user,
        a_movie,
        big_a,
        big_b,
        values,
    }
}

/// `C = M · V` by triple loop; `v` is `n × k`.
pub fn coords(values: &[Vec<f64>], v: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = v.first().map_or(0, |row| row.len());
    values
        .iter()
        .map(|row| {
            (0..k)
                .map(|p| row.iter().enumerate().map(|(i, &x)| x * v[i][p]).sum())
                .collect()
        })
        .collect()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}

pub fn similarities(c: &[Vec<f64>], own: &[f64]) -> Vec<f64> {
    c.iter().map(|row| cosine(own, row)).collect()
}

/// Movies unrated by `u` that some user with non-negative similarity rates
/// at least `w_c` after adjustment.
pub fn recommendable(d: &Dense, adj: &Adjusted, sims: &[f64], own_rated: &[usize], w_c: f64) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..d.n() {
        if own_rated.contains(&i) {
            continue;
        }
        let hit = (0..d.m()).any(|v| sims[v] >= 0.0 && d.r[v][i] != 0 && adj.values[v][i] >= w_c);
        if hit {
            out.push(i);
        }
    }
    out
}

/// `Σ r_vi s_uv / Σ r_vi` over similar raters of `i`.
pub fn raw_degree(d: &Dense, sims: &[f64], i: usize) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for v in 0..d.m() {
        if sims[v] >= 0.0 && d.r[v][i] != 0 {
            num += d.r[v][i] as f64 * sims[v];
            den += d.r[v][i] as f64;
        }
    }
    num / den
}

pub fn min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|&x| if hi > lo { (x - lo) / (hi - lo) } else { 1.0 })
        .collect()
}

/// True when a similarity or adjusted rating sits so close to a threshold
/// that floating-point summation order could flip a set membership.
pub fn borderline(d: &Dense, adj: &Adjusted, sims: &[f64], w_c: f64) -> bool {
    sims.iter().any(|s| s.abs() < 1e-9 && *s != 0.0)
        || (0..d.m()).any(|v| (0..d.n()).any(|i| d.r[v][i] != 0 && (adj.values[v][i] - w_c).abs() < 1e-9))
}

#[derive(Debug, Clone, Default)]
pub struct Groups {
    pub like: Vec<usize>,
    pub dislike: Vec<usize>,
    pub neutral: Vec<usize>,
    pub rec: Vec<usize>,
    pub not_rec: Vec<usize>,
    /// Dislike region members: disliked plus thumbed down.
    pub dislike_region: Vec<usize>,
}

pub fn groups(
    ratings: &[u8],
    degrees: &[Option<f64>],
    up: &[usize],
    down: &[usize],
    like_t: f64,
    dislike_t: f64,
    rec_t: f64,
) -> Groups {
    let mut g = Groups::default();
    for i in 0..ratings.len() {
        let r = ratings[i] as f64;
        if down.contains(&i) {
            g.not_rec.push(i);
        } else if up.contains(&i) {
            g.like.push(i);
        } else if ratings[i] != 0 {
            if r >= like_t {
                g.like.push(i);
            } else if r < dislike_t {
                g.dislike.push(i);
            } else {
                g.neutral.push(i);
            }
        } else if degrees[i].is_some_and(|b| b >= rec_t) {
            g.rec.push(i);
        } else {
            g.not_rec.push(i);
        }
    }
    g.dislike_region = g.dislike.iter().chain(down).copied().collect();
    g.dislike_region.sort_unstable();
    g.dislike_region.dedup();
    g
}

pub fn hull(values: impl IntoIterator<Item = f64>) -> Option<(f64, f64)> {
    let mut it = values.into_iter();
    let first = it.next()?;
    Some(it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x))))
}

fn inside(h: Option<(f64, f64)>, x: f64) -> bool {
    h.is_some_and(|(lo, hi)| lo <= x && x <= hi)
}

/// Region geometry of one dimension.
#[derive(Debug, Clone, Copy)]
pub struct Regions {
    pub like: Option<(f64, f64)>,
    pub dislike: Option<(f64, f64)>,
}

impl Regions {
    pub fn of(x: &[f64], g: &Groups) -> Regions {
        Regions {
            like: hull(g.like.iter().map(|&i| x[i])),
            dislike: hull(g.dislike_region.iter().map(|&i| x[i])),
        }
    }

    pub fn in_like(&self, v: f64) -> bool {
        inside(self.like, v)
    }

    pub fn in_dislike(&self, v: f64) -> bool {
        inside(self.dislike, v)
    }

    pub fn overlap(&self) -> Option<(f64, f64)> {
        let (a, b) = (self.like?, self.dislike?);
        let lo = a.0.max(b.0);
        let hi = a.1.min(b.1);
        (lo <= hi).then_some((lo, hi))
    }

    pub fn in_overlap(&self, v: f64) -> bool {
        inside(self.overlap(), v)
    }
}

/// Suitability score of one dimension, zero when any factor is undefined.
pub fn suitability(x: &[f64], g: &Groups, w_plus: f64, w_o: f64, w_theta: f64) -> f64 {
    let reg = Regions::of(x, g);
    let (Some(like), Some(dislike)) = (reg.like, reg.dislike) else {
        return 0.0;
    };
    let len = |h: (f64, f64)| h.1 - h.0;
    let r_plus = len(like);
    let r_minus = len(dislike);
    let r_o = reg.overlap().map_or(0.0, len);
    let r_all = like.1.max(dislike.1) - like.0.min(dislike.0);
    let inner: Vec<f64> = g.rec.iter().map(|&i| x[i]).filter(|&v| like.0 <= v && v <= like.1).collect();
    let theta = if inner.len() < 2 {
        0.0
    } else {
        let mean = inner.iter().sum::<f64>() / inner.len() as f64;
        (inner.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / inner.len() as f64).sqrt()
    };
    if r_plus <= 0.0 || r_minus <= 0.0 || theta <= 0.0 {
        return 0.0;
    }
    let pow = |b: f64, e: f64| if e == 0.0 { 1.0 } else { (e * b.ln()).exp() };
    let v = pow(r_plus / r_all, w_plus)
        * pow(1.0 - r_o / r_plus, w_o)
        * pow(1.0 - r_o / r_minus, w_o)
        * pow(r_plus / theta, w_theta);
    if v.is_finite() { v } else { f64::MAX }
}

/// Weighted membership disagreement between two dimensions over `candidates`.
pub fn disagreement(xp: &[f64], xq: &[f64], g: &Groups, candidates: &[usize], weight: impl Fn(usize) -> f64) -> f64 {
    let (rp, rq) = (Regions::of(xp, g), Regions::of(xq, g));
    let mut total = 0.0;
    for &i in candidates {
        let mut c = 0.0;
        if rp.in_like(xp[i]) ^ rq.in_like(xq[i]) {
            c += 1.0;
        }
        if rp.in_dislike(xp[i]) ^ rq.in_dislike(xq[i]) {
            c += 1.0;
        }
        total += weight(i) * c;
    }
    total
}

/// Suitability adjusted by thumbs.
pub fn interactive(d_v: f64, x: &[f64], g: &Groups, up: &[usize], down: &[usize], degrees: &[Option<f64>], w_int: f64) -> f64 {
    let reg = Regions::of(x, g);
    let b = |i: usize| degrees[i].unwrap_or(0.0);
    let mut plus = 0.0;
    let mut minus = 0.0;
    for &i in up {
        if reg.in_like(x[i]) {
            plus += b(i);
        }
        if reg.in_dislike(x[i]) {
            minus += b(i);
        }
    }
    for &i in down {
        if reg.in_dislike(x[i]) {
            plus += b(i);
        }
        if reg.in_like(x[i]) {
            minus += b(i);
        }
    }
    d_v + w_int * (plus - minus)
}

/// Degree sums over like, dislike and their overlap-free parts.
pub fn region_sums(x: &[f64], g: &Groups, degrees: &[Option<f64>]) -> [f64; 4] {
    let reg = Regions::of(x, g);
    let mut s = [0.0; 4];
    for &i in &g.rec {
        let b = degrees[i].unwrap_or(0.0);
        let v = x[i];
        let o = reg.in_overlap(v);
        if reg.in_like(v) {
            s[0] += b;
            if !o {
                s[2] += b;
            }
        }
        if reg.in_dislike(v) {
            s[1] += b;
            if !o {
                s[3] += b;
            }
        }
    }
    s
}

/// Textbook dense SVD of the adjusted matrix via nalgebra; returns singular
/// values descending and `V` as `n × k` rows.
pub fn reference_svd(values: &[Vec<f64>], k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = values.len();
    let n = values[0].len();
    let mat = nalgebra::DMatrix::from_fn(m, n, |r, c| values[r][c]);
    let svd = nalgebra::linalg::SVD::new(mat, false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    order.truncate(k);
    let s = order.iter().map(|&j| svd.singular_values[j]).collect();
    let v = (0..n).map(|i| order.iter().map(|&j| vt[(j, i)]).collect()).collect();
    (s, v)
}

pub fn frobenius_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y) * (x - y)))
        .sum::<f64>()
        .sqrt()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= tol * scale
}

/// Users and movies with planted taste factors; users rate a random subset
/// of movies with ratings driven by factor agreement plus noise.
pub fn synthetic(users: u32, movies: u32, density: f64, seed: u64) -> Vec<(u32, u32, u8)> {
    const FACTORS: usize = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..FACTORS).map(|_| rng.random_range(-1.0..1.0)).collect() };
    let user_f: Vec<Vec<f64>> = (0..users).map(|_| draw(&mut rng)).collect();
    let movie_f: Vec<Vec<f64>> = (0..movies).map(|_| draw(&mut rng)).collect();
    let mut out = Vec::new();
    for u in 0..users as usize {
        let mut rated = 0;
        for i in 0..movies as usize {
            let last_chance = i + 3 >= movies as usize && rated < 3;
            if !(last_chance || rng.random_bool(density)) {
                continue;
            }
            let affinity: f64 = user_f[u].iter().zip(&movie_f[i]).map(|(a, b)| a * b).sum();
            let noise: f64 = rng.random_range(-0.6..0.6);
            let r = (3.0 + 2.2 * affinity + noise).round().clamp(1.0, 5.0) as u8;
            out.push((u as u32 + 1, i as u32 + 1, r));
            rated += 1;
        }
    }
    out
}
