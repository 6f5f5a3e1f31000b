//! MovieLens-format rating data: records, loader, summary statistics.
//!
//! Movies and users keep their external ids; everything downstream works on
//! dense positional indices (`0..movie_count()`, `0..user_count()`), which
//! follow the order of `u.item` / `u.user` (or first appearance when a
//! dataset is assembled in memory).

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The fixed MovieLens 100K genre vocabulary, in flag order.
pub const GENRES: [&str; 19] = [
    "unknown",
    "Action",
    "Adventure",
    "Animation",
    "Children's",
    "Comedy",
    "Crime",
    "Documentary",
    "Drama",
    "Fantasy",
    "Film-Noir",
    "Horror",
    "Musical",
    "Mystery",
    "Romance",
    "Sci-Fi",
    "Thriller",
    "War",
    "Western",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MovieId(pub u32);

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for MovieId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovieRecord {
    pub id: MovieId,
    pub title: String,
    pub release_date: Option<String>,
    pub release_year: Option<i32>,
    /// Labels from [`GENRES`]; `["unknown"]` when no flag is set.
    pub genres: Vec<String>,
    /// The raw `|`-joined flag columns as they appeared in `u.item`.
    pub genre_flags: String,
}

impl MovieRecord {
    /// A record with a placeholder title, used when assembling datasets in memory.
    pub fn placeholder(id: MovieId) -> Self {
        MovieRecord {
            id,
            title: format!("Movie {}", id.0),
            release_date: None,
            release_year: None,
            genres: vec![GENRES[0].to_string()],
            genre_flags: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRecord {
    pub id: UserId,
    pub age: Option<u32>,
    pub gender: Option<String>,
    pub occupation: Option<String>,
    pub zip: Option<String>,
}

impl UserRecord {
    pub fn anonymous(id: UserId) -> Self {
        UserRecord {
            id,
            age: None,
            gender: None,
            occupation: None,
            zip: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub user: UserId,
    pub movie: MovieId,
    pub rating: u8,
    pub timestamp: i64,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Malformed {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}:{line}: rating {value} outside 1..=5")]
    RatingOutOfRange {
        file: String,
        line: usize,
        value: i64,
    },
    #[error("duplicate rating for user {user}, movie {movie} (line {line})")]
    DuplicateRating {
        user: UserId,
        movie: MovieId,
        line: usize,
    },
    #[error("duplicate movie id {0}")]
    DuplicateMovie(MovieId),
    #[error("duplicate user id {0}")]
    DuplicateUser(UserId),
    #[error("rating on line {line} references unknown user {user}")]
    UnknownUser { user: UserId, line: usize },
    #[error("rating on line {line} references unknown movie {movie}")]
    UnknownMovie { movie: MovieId, line: usize },
    #[error("no ratings")]
    NoRatings,
}

/// Immutable rating dataset with per-user and per-movie indexes.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingDataset {
    movies: Vec<MovieRecord>,
    users: Vec<UserRecord>,
    ratings: Vec<RatingRecord>,
    movie_index: HashMap<MovieId, usize>,
    user_index: HashMap<UserId, usize>,
    /// `(movie index, rating)` sorted by movie index.
    by_user: Vec<Vec<(usize, u8)>>,
    /// `(user index, rating)` sorted by user index.
    by_movie: Vec<Vec<(usize, u8)>>,
}

/// Serializable form; indexes are rebuilt on load.
#[derive(Serialize, Deserialize)]
pub(crate) struct DatasetParts {
    pub movies: Vec<MovieRecord>,
    pub users: Vec<UserRecord>,
    pub ratings: Vec<RatingRecord>,
}

impl RatingDataset {
    /// Validates the records and builds the indexes. `line` numbers in errors
    /// are 1-based positions in `ratings`.
    pub fn new(
        movies: Vec<MovieRecord>,
        users: Vec<UserRecord>,
        ratings: Vec<RatingRecord>,
    ) -> Result<Self, DatasetError> {
        if ratings.is_empty() {
            return Err(DatasetError::NoRatings);
        }
        let mut movie_index = HashMap::with_capacity(movies.len());
        for (i, m) in movies.iter().enumerate() {
            if movie_index.insert(m.id, i).is_some() {
                return Err(DatasetError::DuplicateMovie(m.id));
            }
        }
        let mut user_index = HashMap::with_capacity(users.len());
        for (i, u) in users.iter().enumerate() {
            if user_index.insert(u.id, i).is_some() {
                return Err(DatasetError::DuplicateUser(u.id));
            }
        }

        let mut by_user = vec![Vec::new(); users.len()];
        let mut by_movie = vec![Vec::new(); movies.len()];
        for (line, r) in ratings.iter().enumerate() {
            let line = line + 1;
            if !(1..=5).contains(&r.rating) {
                return Err(DatasetError::RatingOutOfRange {
                    file: "ratings".into(),
                    line,
                    value: r.rating as i64,
                });
            }
            let u = *user_index
                .get(&r.user)
                .ok_or(DatasetError::UnknownUser { user: r.user, line })?;
            let m = *movie_index
                .get(&r.movie)
                .ok_or(DatasetError::UnknownMovie {
                    movie: r.movie,
                    line,
                })?;
            by_user[u].push((m, r.rating, line));
            by_movie[m].push((u, r.rating));
        }

        let mut by_user_sorted = Vec::with_capacity(by_user.len());
        for (u, mut list) in by_user.into_iter().enumerate() {
            list.sort_unstable_by_key(|&(m, _, line)| (m, line));
            if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(DatasetError::DuplicateRating {
                    user: users[u].id,
                    movie: movies[w[1].0].id,
                    line: w[1].2,
                });
            }
            by_user_sorted.push(list.into_iter().map(|(m, r, _)| (m, r)).collect());
        }
        for list in &mut by_movie {
            list.sort_unstable_by_key(|&(u, _)| u);
        }

        Ok(RatingDataset {
            movies,
            users,
            ratings,
            movie_index,
            user_index,
            by_user: by_user_sorted,
            by_movie,
        })
    }

    /// Builds a dataset from `(user, movie, rating)` triples, creating
    /// placeholder user and movie records in order of first appearance.
    pub fn from_triples(triples: &[(u32, u32, u8)]) -> Result<Self, DatasetError> {
        let mut users: Vec<UserRecord> = Vec::new();
        let mut movies: Vec<MovieRecord> = Vec::new();
        let mut seen_users = HashMap::new();
        let mut seen_movies = HashMap::new();
        let mut ratings = Vec::with_capacity(triples.len());
        for &(u, m, r) in triples {
            seen_users.entry(u).or_insert_with(|| {
                users.push(UserRecord::anonymous(UserId(u)));
            });
            seen_movies.entry(m).or_insert_with(|| {
                movies.push(MovieRecord::placeholder(MovieId(m)));
            });
            ratings.push(RatingRecord {
                user: UserId(u),
                movie: MovieId(m),
                rating: r,
                timestamp: 0,
            });
        }
        Self::new(movies, users, ratings)
    }

    /// Returns a copy with an extra user record (which may have no ratings).
    pub fn with_user(&self, user: UserRecord) -> Result<Self, DatasetError> {
        let mut users = self.users.clone();
        users.push(user);
        Self::new(self.movies.clone(), users, self.ratings.clone())
    }

    pub(crate) fn to_parts(&self) -> DatasetParts {
        DatasetParts {
            movies: self.movies.clone(),
            users: self.users.clone(),
            ratings: self.ratings.clone(),
        }
    }

    pub(crate) fn from_parts(parts: DatasetParts) -> Result<Self, DatasetError> {
        Self::new(parts.movies, parts.users, parts.ratings)
    }

    pub fn movies(&self) -> &[MovieRecord] {
        &self.movies
    }

    pub fn users(&self) -> &[UserRecord] {
        &self.users
    }

    pub fn ratings(&self) -> &[RatingRecord] {
        &self.ratings
    }

    pub fn movie_count(&self) -> usize {
        self.movies.len()
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn rating_count(&self) -> usize {
        self.ratings.len()
    }

    pub fn movie_idx(&self, id: MovieId) -> Option<usize> {
        self.movie_index.get(&id).copied()
    }

    pub fn user_idx(&self, id: UserId) -> Option<usize> {
        self.user_index.get(&id).copied()
    }

    pub fn movie(&self, idx: usize) -> &MovieRecord {
        &self.movies[idx]
    }

    pub fn user(&self, idx: usize) -> &UserRecord {
        &self.users[idx]
    }

    /// Ratings of a user as `(movie index, rating)`, sorted by movie index.
    pub fn user_ratings(&self, user: usize) -> &[(usize, u8)] {
        &self.by_user[user]
    }

    /// Ratings of a movie as `(user index, rating)`, sorted by user index.
    pub fn movie_ratings(&self, movie: usize) -> &[(usize, u8)] {
        &self.by_movie[movie]
    }

    /// `None` means "not rated".
    pub fn rating(&self, user: usize, movie: usize) -> Option<u8> {
        let list = &self.by_user[user];
        list.binary_search_by_key(&movie, |&(m, _)| m)
            .ok()
            .map(|pos| list[pos].1)
    }

    pub fn is_rated(&self, user: usize, movie: usize) -> bool {
        self.rating(user, movie).is_some()
    }

    /// Number of raters.
    pub fn popularity(&self, movie: usize) -> usize {
        self.by_movie[movie].len()
    }

    pub fn movie_average(&self, movie: usize) -> Option<f64> {
        mean_rating(&self.by_movie[movie])
    }

    pub fn user_average(&self, user: usize) -> Option<f64> {
        mean_rating(&self.by_user[user])
    }
}

fn mean_rating(list: &[(usize, u8)]) -> Option<f64> {
    if list.is_empty() {
        None
    } else {
        Some(list.iter().map(|&(_, r)| r as f64).sum::<f64>() / list.len() as f64)
    }
}

/// Loads `u.data`, `u.item` and `u.user` from a MovieLens 100K directory.
pub fn load_movielens(data_dir: impl AsRef<Path>) -> Result<RatingDataset, DatasetError> {
    let dir = data_dir.as_ref();
    let items = read_text(&dir.join("u.item"))?;
    let users = read_text(&dir.join("u.user"))?;
    let data = read_text(&dir.join("u.data"))?;

    let movies = parse_items(&items)?;
    let users = parse_users(&users)?;
    let ratings = parse_ratings(&data)?;
    if ratings.is_empty() {
        return Err(DatasetError::NoRatings);
    }
    // Re-run validation so that errors point at u.data line numbers.
    let mut seen = HashMap::with_capacity(ratings.len());
    for (line, r) in ratings.iter().enumerate() {
        if let Some(_first) = seen.insert((r.user, r.movie), line + 1) {
            return Err(DatasetError::DuplicateRating {
                user: r.user,
                movie: r.movie,
                line: line + 1,
            });
        }
    }
    RatingDataset::new(movies, users, ratings).map_err(|err| match err {
        DatasetError::UnknownUser { user, line } => DatasetError::Malformed {
            file: "u.data".into(),
            line,
            message: format!("unknown user {user}"),
        },
        DatasetError::UnknownMovie { movie, line } => DatasetError::Malformed {
            file: "u.data".into(),
            line,
            message: format!("unknown movie {movie}"),
        },
        other => other,
    })
}

/// MovieLens ships ISO-8859-1 text; valid UTF-8 is taken as is.
fn read_text(path: &Path) -> Result<String, DatasetError> {
    let bytes = fs::read(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            DatasetError::MissingFile(path.to_path_buf())
        } else {
            DatasetError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    Ok(match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(err) => err.into_bytes().iter().map(|&b| b as char).collect(),
    })
}

fn malformed(file: &str, line: usize, message: impl Into<String>) -> DatasetError {
    DatasetError::Malformed {
        file: file.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_ratings(text: &str) -> Result<Vec<RatingRecord>, DatasetError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').map(str::trim).collect();
        if cols.len() != 4 {
            return Err(malformed("u.data", line, format!("expected 4 tab-separated fields, found {}", cols.len())));
        }
        let user: u32 = cols[0]
            .parse()
            .map_err(|_| malformed("u.data", line, format!("bad user id {:?}", cols[0])))?;
        let movie: u32 = cols[1]
            .parse()
            .map_err(|_| malformed("u.data", line, format!("bad item id {:?}", cols[1])))?;
        let rating: i64 = cols[2]
            .parse()
            .map_err(|_| malformed("u.data", line, format!("bad rating {:?}", cols[2])))?;
        let timestamp: i64 = cols[3]
            .parse()
            .map_err(|_| malformed("u.data", line, format!("bad timestamp {:?}", cols[3])))?;
        if !(1..=5).contains(&rating) {
            return Err(DatasetError::RatingOutOfRange {
                file: "u.data".into(),
                line,
                value: rating,
            });
        }
        out.push(RatingRecord {
            user: UserId(user),
            movie: MovieId(movie),
            rating: rating as u8,
            timestamp,
        });
    }
    Ok(out)
}

fn parse_items(text: &str) -> Result<Vec<MovieRecord>, DatasetError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = raw.split('|').collect();
        if cols.len() != 5 + GENRES.len() {
            return Err(malformed(
                "u.item",
                line,
                format!("expected {} fields, found {}", 5 + GENRES.len(), cols.len()),
            ));
        }
        let id: u32 = cols[0]
            .trim()
            .parse()
            .map_err(|_| malformed("u.item", line, format!("bad movie id {:?}", cols[0])))?;
        let flags = &cols[5..];
        let mut genres = Vec::new();
        for (g, flag) in flags.iter().enumerate() {
            match flag.trim() {
                "1" => genres.push(GENRES[g].to_string()),
                "0" => {}
                other => {
                    return Err(malformed("u.item", line, format!("bad genre flag {other:?}")));
                }
            }
        }
        if genres.is_empty() {
            genres.push(GENRES[0].to_string());
        }
        let release_date = Some(cols[2].trim()).filter(|s| !s.is_empty()).map(String::from);
        let release_year = release_date
            .as_deref()
            .and_then(|d| d.rsplit('-').next())
            .and_then(|y| y.parse().ok());
        out.push(MovieRecord {
            id: MovieId(id),
            title: cols[1].to_string(),
            release_date,
            release_year,
            genres,
            genre_flags: flags.join("|"),
        });
    }
    Ok(out)
}

fn parse_users(text: &str) -> Result<Vec<UserRecord>, DatasetError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = raw.split('|').map(str::trim).collect();
        if cols.len() < 4 {
            return Err(malformed("u.user", line, format!("expected 5 fields, found {}", cols.len())));
        }
        let id: u32 = cols[0]
            .parse()
            .map_err(|_| malformed("u.user", line, format!("bad user id {:?}", cols[0])))?;
        let opt = |s: &str| Some(s).filter(|s| !s.is_empty()).map(String::from);
        out.push(UserRecord {
            id: UserId(id),
            age: cols[1].parse().ok(),
            gender: opt(cols[2]),
            occupation: opt(cols[3]),
            zip: cols.get(4).and_then(|s| opt(s)),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityStats {
    pub id: u32,
    pub count: usize,
    pub average: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub users: Vec<EntityStats>,
    pub movies: Vec<EntityStats>,
    /// Fraction of unrated user/movie cells.
    pub sparsity: f64,
}

pub fn dataset_stats(ds: &RatingDataset) -> StatsReport {
    let users = (0..ds.user_count())
        .map(|u| EntityStats {
            id: ds.user(u).id.0,
            count: ds.user_ratings(u).len(),
            average: ds.user_average(u),
        })
        .collect();
    let movies = (0..ds.movie_count())
        .map(|m| EntityStats {
            id: ds.movie(m).id.0,
            count: ds.movie_ratings(m).len(),
            average: ds.movie_average(m),
        })
        .collect();
    let cells = (ds.user_count() * ds.movie_count()) as f64;
    StatsReport {
        users,
        movies,
        sparsity: 1.0 - ds.rating_count() as f64 / cells,
    }
}
