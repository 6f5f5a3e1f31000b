use ndarray::ArrayView1;
use rand::Rng;

use crate::config::StoryParams;
use crate::lsm::{DimensionLayout, Feedback, Interval, Thumb};

/// Truncated Gaussian weight a thumbed movie at distance `d` applies to a candidate.
pub fn thumb_factor(thumb: Thumb, d: f64, radius: f64, params: &StoryParams) -> f64 {
    if d > radius {
        return 1.0;
    }
    let sigma = radius / 2.0;
    let g = if sigma > 0.0 {
        (-(d * d) / (2.0 * sigma * sigma)).exp()
    } else {
        1.0
    };
    match thumb {
        Thumb::Up => 1.0 + params.alpha_up * g,
        Thumb::Down => 1.0 - params.alpha_down * g,
    }
}

/// Scores candidates on one dimension around a random location.
pub struct Selector<'a> {
    pub x: ArrayView1<'a, f64>,
    pub degrees: &'a [Option<f64>],
    pub feedback: &'a Feedback,
    pub extent: Interval,
    pub params: &'a StoryParams,
}

impl Selector<'_> {
    pub fn radius(&self) -> f64 {
        self.params.thumb_radius_frac * self.extent.len()
    }

    fn epsilon(&self) -> f64 {
        let e = self.params.epsilon_frac * self.extent.len();
        if e > 0.0 {
            e
        } else {
            f64::MIN_POSITIVE
        }
    }

    /// Product of thumb factors at candidate `i`.
    pub fn thumb_weight(&self, i: usize) -> f64 {
        let radius = self.radius();
        self.feedback
            .thumbs()
            .map(|(q, thumb)| thumb_factor(thumb, (self.x[q] - self.x[i]).abs(), radius, self.params))
            .product()
    }

    /// Selection score of candidate `i` for window center `l`.
    pub fn score(&self, i: usize, l: f64) -> f64 {
        let b = self.degrees[i].unwrap_or(0.0);
        b * self.thumb_weight(i) / (self.x[i] - l).abs().max(self.epsilon())
    }

    /// Best candidate of `pool` within the window around `l`, widening the
    /// window until it holds a candidate. Ties go to the closer, then the
    /// lower-indexed movie.
    pub fn pick_at(&self, zone: Interval, pool: &[usize], l: f64) -> Option<usize> {
        if pool.is_empty() {
            return None;
        }
        let mut width = self.params.window_frac * zone.len();
        if width <= 0.0 {
            width = self.params.window_frac * self.extent.len();
        }
        if width <= 0.0 {
            width = 1.0;
        }
        let farthest = pool.iter().map(|&i| (self.x[i] - l).abs()).fold(0.0, f64::max);
        let window: Vec<usize> = loop {
            let inside: Vec<usize> = pool.iter().copied().filter(|&i| (self.x[i] - l).abs() <= width).collect();
            if !inside.is_empty() {
                break inside;
            }
            if width > farthest {
                break pool.to_vec();
            }
            width *= 2.0;
        };
        window.into_iter().max_by(|&a, &b| {
            self.score(a, l)
                .total_cmp(&self.score(b, l))
                .then((self.x[b] - l).abs().total_cmp(&(self.x[a] - l).abs()))
                .then(b.cmp(&a))
        })
    }

    /// Draws a uniform location in `zone` and picks around it.
    pub fn select_movie<R: Rng + ?Sized>(&self, zone: Interval, pool: &[usize], rng: &mut R) -> Option<usize> {
        let l = if zone.len() > 0.0 {
            rng.random_range(zone.lo..=zone.hi)
        } else {
            zone.lo
        };
        self.pick_at(zone, pool, l)
    }
}

/// Normalized typicality `|x| / max|x|`.
pub fn typicality(layout: &DimensionLayout, x: f64) -> f64 {
    let m = layout.max_abs();
    if m > 0.0 {
        (x.abs() / m).min(1.0)
    } else {
        0.0
    }
}

/// Center used for familiarity: `c_+`, or the extent midpoint without a like region.
pub fn familiarity_center(layout: &DimensionLayout) -> f64 {
    layout.like_center.unwrap_or_else(|| layout.extent.midpoint())
}

/// Normalized familiarity `1 − |x − c_+| / H`, `H` the largest distance from
/// `c_+` within the extent. Higher means closer to the liked movies.
pub fn familiarity(layout: &DimensionLayout, x: f64) -> f64 {
    let c = familiarity_center(layout);
    let h = (layout.extent.lo - c).abs().max((layout.extent.hi - c).abs());
    if h > 0.0 {
        (1.0 - (x - c).abs() / h).clamp(0.0, 1.0)
    } else {
        1.0
    }
}

/// Accept iff adding `candidate` moves the mean attribute strictly closer
/// to `target`. An empty selection always accepts.
pub fn admit_candidate(selected: &[f64], candidate: f64, target: f64) -> bool {
    if selected.is_empty() {
        return true;
    }
    admission_gap(selected, candidate, target) < current_gap(selected, target)
}

fn current_gap(selected: &[f64], target: f64) -> f64 {
    (selected.iter().sum::<f64>() / selected.len() as f64 - target).abs()
}

/// Distance to `target` of the mean after adding `candidate`.
pub fn admission_gap(selected: &[f64], candidate: f64, target: f64) -> f64 {
    let n = selected.len() as f64 + 1.0;
    ((selected.iter().sum::<f64>() + candidate) / n - target).abs()
}
