//! Request and response bodies.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use storyrec_core::engine::GROUP_COLORS;
use storyrec_core::lsm::Group;
use storyrec_core::{DimensionView, MovieId, Preferences, Story, UserId};

/// Decimal places kept for movie positions on the wire.
pub const POSITION_DECIMALS: i32 = 6;

/// Field names holding a movie's coordinate on a dimension.
const POSITION_KEYS: [&str; 2] = ["projection", "position"];

pub fn round_position(x: f64) -> f64 {
    let scale = 10f64.powi(POSITION_DECIMALS);
    (x * scale).round() / scale
}

/// Rounds every position-like field in a JSON tree, in place.
pub fn round_positions(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for (k, child) in map.iter_mut() {
                if POSITION_KEYS.contains(&k.as_str()) {
                    if let Some(x) = child.as_f64() {
                        *child = Value::from(round_position(x));
                        continue;
                    }
                }
                round_positions(child);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_positions),
        _ => {}
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct CreateSession {
    pub user_id: u32,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FeedbackRequest {
    pub movie_id: u32,
    pub thumb: String,
}

/// Either field may be omitted to keep its current value.
#[derive(Debug, Clone, Deserialize)]
pub struct PreferencesRequest {
    pub f: Option<f64>,
    pub t: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MovieQuery {
    pub user: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PreferenceValues {
    pub f: f64,
    pub t: f64,
}

impl From<Preferences> for PreferenceValues {
    fn from(p: Preferences) -> Self {
        PreferenceValues {
            f: p.familiar,
            t: p.typical,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub user_id: UserId,
    pub seed: u64,
    pub preferences: PreferenceValues,
    pub thumbs_up: Vec<MovieId>,
    pub thumbs_down: Vec<MovieId>,
    pub stories_generated: u64,
    pub created_at: u64,
    pub updated_at: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeedbackResponse {
    pub movie_id: MovieId,
    pub thumb: String,
    pub weight: f64,
    pub group: Group,
    pub session: SessionSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CueSet {
    Intro,
    Anchors,
    Event,
}

/// One animation step. The player walks the list in order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cue {
    pub seq: usize,
    pub set: CueSet,
    pub step: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub movie_id: Option<MovieId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u8>,
}

const INTRO_STEPS: [&str; 4] = ["dimension_axis", "preference_regions", "movie_nodes", "story_zones"];
const ANCHOR_STEPS: [&str; 3] = ["anchor_left", "anchor_right", "narrative_direction"];
const LEVEL_STEPS: [&str; 3] = ["level_1", "level_2", "level_3"];

/// Intro cues, anchor cues, then levels 1 to 3 for each event in order.
pub fn cue_list(story: &Story) -> Vec<Cue> {
    let mut cues = Vec::with_capacity(INTRO_STEPS.len() + ANCHOR_STEPS.len() + 3 * story.events.len());
    let mut push = |set, step, event_index, movie_id, level| {
        let seq = cues.len();
        cues.push(Cue {
            seq,
            set,
            step,
            event_index,
            movie_id,
            level,
        });
    };
    for step in INTRO_STEPS {
        push(CueSet::Intro, step, None, None, None);
    }
    push(CueSet::Anchors, ANCHOR_STEPS[0], None, Some(story.anchor_left.movie_id), None);
    push(CueSet::Anchors, ANCHOR_STEPS[1], None, Some(story.anchor_right.movie_id), None);
    push(CueSet::Anchors, ANCHOR_STEPS[2], None, None, None);
    for (i, e) in story.events.iter().enumerate() {
        for (level, step) in (1u8..).zip(LEVEL_STEPS) {
            push(CueSet::Event, step, Some(i), Some(e.movie_id), Some(level));
        }
    }
    cues
}

/// A story on the wire: the engine story (positions rounded) plus a server
/// id, its index in the session and the animation cues.
#[derive(Debug, Clone, Serialize)]
pub struct ApiStory {
    pub story_id: String,
    pub session_id: String,
    pub index: u64,
    #[serde(flatten)]
    pub story: Value,
    pub cues: Vec<Cue>,
}

impl ApiStory {
    pub fn new(session_id: &str, index: u64, story: &Story) -> Result<Self, serde_json::Error> {
        let mut body = serde_json::to_value(story)?;
        round_positions(&mut body);
        Ok(ApiStory {
            story_id: format!("{session_id}-{index}"),
            session_id: session_id.to_string(),
            index,
            story: body,
            cues: cue_list(story),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ColorKey {
    pub group: Group,
    pub color: &'static str,
}

pub fn color_key() -> Vec<ColorKey> {
    GROUP_COLORS.iter().map(|&(group, color)| ColorKey { group, color }).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ApiDimensionView {
    #[serde(flatten)]
    pub view: Value,
    pub colors: Vec<ColorKey>,
}

impl ApiDimensionView {
    pub fn new(view: &DimensionView) -> Result<Self, serde_json::Error> {
        let mut body = serde_json::to_value(view)?;
        round_positions(&mut body);
        Ok(ApiDimensionView {
            view: body,
            colors: color_key(),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HistoryResponse {
    pub user_id: UserId,
    pub count: usize,
    pub movies: Vec<storyrec_core::engine::RatedMovie>,
}
