//! Per-user interactive state: preferences, thumbs, per-movie weights,
//! story history and a replayable event log.

use std::collections::VecDeque;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::Thresholds;
use crate::dataset::{MovieId, UserId};
use crate::engine::{Engine, UserProfile};
use crate::error::{Error, Result};
use crate::lsm::{build_user_model_at, Feedback, Group, Thumb, UserModel};
use crate::story::{generate_story, Preferences, Story, StoryError, StoryInput};

pub const HISTORY_LIMIT: usize = 100;

/// Mixes the session seed with a story index (splitmix64 finalizer).
pub fn story_seed(session_seed: u64, index: u64) -> u64 {
    let mut z = session_seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn now_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub index: u64,
    pub dimension: usize,
    pub seed: u64,
    pub movie_ids: Vec<MovieId>,
}

/// One line of the session log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    Created { user_id: UserId, seed: u64, at: u64 },
    Preferences { f: f64, t: f64, at: u64 },
    Thumb { movie_id: MovieId, thumb: Thumb, at: u64 },
    Story { index: u64, seed: u64, dimension: usize, movie_ids: Vec<MovieId>, at: u64 },
}

/// Effect of one thumb, for display.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThumbSummary {
    pub movie_id: MovieId,
    pub thumb: Thumb,
    pub weight: f64,
    pub group: Group,
}

#[derive(Debug, Clone)]
pub struct SessionState {
    pub user_id: UserId,
    pub seed: u64,
    preferences: Preferences,
    feedback: Feedback,
    history: VecDeque<HistoryEntry>,
    stories_generated: u64,
    rotation: usize,
    last_dimension: Option<usize>,
    log: Vec<SessionEvent>,
    profile: UserProfile,
    model: Option<UserModel>,
    pub created_at: u64,
    pub updated_at: u64,
}

impl SessionState {
    pub fn create(engine: &Engine, user_id: UserId, seed: u64) -> Result<SessionState> {
        let profile = engine.profile(user_id)?;
        let at = now_millis();
        Ok(SessionState {
            user_id,
            seed,
            preferences: Preferences::default(),
            feedback: Feedback::default(),
            history: VecDeque::new(),
            stories_generated: 0,
            rotation: 0,
            last_dimension: None,
            log: vec![SessionEvent::Created { user_id, seed, at }],
            profile,
            model: None,
            created_at: at,
            updated_at: at,
        })
    }

    pub fn preferences(&self) -> Preferences {
        self.preferences
    }

    pub fn feedback(&self) -> &Feedback {
        &self.feedback
    }

    pub fn profile(&self) -> &UserProfile {
        &self.profile
    }

    pub fn history(&self) -> impl Iterator<Item = &HistoryEntry> {
        self.history.iter()
    }

    pub fn stories_generated(&self) -> u64 {
        self.stories_generated
    }

    pub fn log(&self) -> &[SessionEvent] {
        &self.log
    }

    pub fn weight(&self, movie: MovieId, engine: &Engine) -> Result<f64> {
        Ok(self.feedback.weight(engine.movie_index(movie)?))
    }

    fn touch(&mut self) -> u64 {
        self.updated_at = now_millis();
        self.updated_at
    }

    /// Takes effect from the next story. Setting the current values changes nothing.
    pub fn set_preferences(&mut self, familiar: f64, typical: f64) -> Result<()> {
        let prefs = Preferences::new(familiar, typical)?;
        if prefs == self.preferences {
            return Ok(());
        }
        self.preferences = prefs;
        self.rotation = 0;
        let at = self.touch();
        self.log.push(SessionEvent::Preferences {
            f: familiar,
            t: typical,
            at,
        });
        Ok(())
    }

    /// Latest thumb wins; every thumb doubles the movie's weight.
    pub fn apply_thumb(&mut self, engine: &Engine, movie_id: MovieId, thumb: Thumb) -> Result<ThumbSummary> {
        let i = engine.movie_index(movie_id)?;
        match thumb {
            Thumb::Up => {
                self.feedback.down.remove(&i);
                self.feedback.up.insert(i);
            }
            Thumb::Down => {
                self.feedback.up.remove(&i);
                self.feedback.down.insert(i);
            }
        }
        let w = self.feedback.weight(i) * 2.0;
        self.feedback.weights.insert(i, w);
        self.model = None;
        self.rotation = 0;
        let at = self.touch();
        self.log.push(SessionEvent::Thumb { movie_id, thumb, at });
        let group = self.model(engine).groups.group_of(i);
        Ok(ThumbSummary {
            movie_id,
            thumb,
            weight: w,
            group,
        })
    }

    /// The user model for the current feedback, computed on first use.
    pub fn model(&mut self, engine: &Engine) -> &UserModel {
        if self.model.is_none() {
            self.model = Some(engine.user_model(&self.profile, &self.feedback));
        }
        self.model.as_ref().expect("model computed above")
    }

    fn story_with(&self, engine: &Engine, model: &UserModel, seed: u64) -> Result<Story, StoryError> {
        generate_story(&StoryInput {
            dataset: engine.dataset(),
            space: engine.space(),
            model,
            degrees: &self.profile.neighborhood.degrees,
            ratings: &self.profile.ratings,
            feedback: &self.feedback,
            preferences: self.preferences,
            params: &engine.story_params,
            rotation: self.rotation,
            avoid: self.last_dimension,
            seed,
        })
    }

    /// Generates the next story, relaxing the like and recommendable
    /// thresholds once if the pool runs dry.
    pub fn next_story(&mut self, engine: &Engine) -> Result<Story> {
        let index = self.stories_generated;
        let seed = story_seed(self.seed, index);
        let model = self.model(engine).clone();
        let story = match self.story_with(engine, &model, seed) {
            Err(StoryError::PoolExhausted { .. }) => {
                let t = model.thresholds;
                let like = (t.like - 1.0).max(1.0);
                let relaxed = Thresholds {
                    like,
                    dislike: t.dislike.min(like),
                    recommend: t.recommend - 0.1,
                };
                let params = crate::config::ModelParams {
                    adaptive_thresholds: false,
                    ..engine.model_params.clone()
                };
                let relaxed_model = build_user_model_at(
                    engine.space(),
                    &self.profile.ratings,
                    &self.profile.neighborhood,
                    &self.feedback,
                    &params,
                    relaxed,
                );
                self.story_with(engine, &relaxed_model, seed)?
            }
            other => other?,
        };

        self.stories_generated += 1;
        self.rotation = story.rotation_index.map_or(self.rotation + 1, |r| r + 1);
        self.last_dimension = Some(story.dimension);
        let movie_ids: Vec<MovieId> = story.events.iter().map(|e| e.movie_id).collect();
        self.history.push_back(HistoryEntry {
            index,
            dimension: story.dimension,
            seed,
            movie_ids: movie_ids.clone(),
        });
        while self.history.len() > HISTORY_LIMIT {
            self.history.pop_front();
        }
        let at = self.touch();
        self.log.push(SessionEvent::Story {
            index,
            seed,
            dimension: story.dimension,
            movie_ids,
            at,
        });
        Ok(story)
    }

    /// The event log as JSON lines.
    pub fn export_log(&self) -> String {
        let mut out = String::new();
        for e in &self.log {
            out.push_str(&serde_json::to_string(e).expect("session events serialize"));
            out.push('\n');
        }
        out
    }
}

/// Rebuilds a session from its log, regenerating every logged story. Fails
/// if a regenerated story differs from the one recorded.
pub fn replay(engine: &Engine, log: &str) -> Result<(SessionState, Vec<Story>)> {
    let mut session: Option<SessionState> = None;
    let mut stories = Vec::new();
    for (n, line) in log.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| Error::Replay {
            line: line_no,
            message,
        };
        let event: SessionEvent = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        match (event, session.as_mut()) {
            (SessionEvent::Created { user_id, seed, .. }, None) => {
                session = Some(SessionState::create(engine, user_id, seed)?);
            }
            (SessionEvent::Created { .. }, Some(_)) => return Err(bad("second session header".into())),
            (_, None) => return Err(bad("log does not start with a session header".into())),
            (SessionEvent::Preferences { f, t, .. }, Some(s)) => s.set_preferences(f, t)?,
            (SessionEvent::Thumb { movie_id, thumb, .. }, Some(s)) => {
                s.apply_thumb(engine, movie_id, thumb)?;
            }
            (SessionEvent::Story { index, seed, dimension, movie_ids, .. }, Some(s)) => {
                let story = s.next_story(engine)?;
                let ids: Vec<MovieId> = story.events.iter().map(|e| e.movie_id).collect();
                if index != s.stories_generated - 1 || seed != story.seed || dimension != story.dimension || ids != movie_ids {
                    return Err(bad(format!("story {index} diverged on replay")));
                }
                stories.push(story);
            }
        }
    }
    let session = session.ok_or(Error::Replay {
        line: 0,
        message: "empty log".into(),
    })?;
    Ok((session, stories))
}
