//! Story contract checks shared by the story property tests and the
//! acceptance suite.
#![allow(dead_code)]

use std::collections::HashSet;

use storyrec_core::lsm::{FamiliarityZone, Group, Thumb};
use storyrec_core::story::{sample_counts, Role, StructureKind, ZoneKind};
use storyrec_core::{Engine, MovieId, Preferences, SessionState, Story, UserId};

/// `|x| / max|x|` over the dimension extent, recomputed from the layout bounds.
pub fn typicality(story: &Story, x: f64) -> f64 {
    let m = story.layout.extent.lo.abs().max(story.layout.extent.hi.abs());
    if m > 0.0 {
        x.abs() / m
    } else {
        0.0
    }
}

/// Every structural promise a single story makes.
pub fn check_story(session: &mut SessionState, engine: &Engine, story: &Story, excluded: &HashSet<MovieId>) -> Result<(), String> {
    let prefs = session.preferences();
    let length = engine.story_params.length;
    if story.rebalanced {
        return Err("zone counts were rebalanced".into());
    }
    let (primary, secondary) = sample_counts(prefs, length, story.structure);
    let expected = if story.structure.starts_primary() {
        [primary, secondary]
    } else {
        [secondary, primary]
    };
    for (zone, want) in story.zones.iter().zip(expected) {
        let got = story.events.iter().filter(|e| e.zone == zone.kind).count();
        if zone.count != want || got != want {
            return Err(format!("zone {:?}: planned {} placed {got}, expected {want}", zone.kind, zone.count));
        }
    }
    well_formed(session, engine, story, excluded)
}

/// Structure every story keeps, including rebalanced ones: length, order,
/// distinct recommendable movies inside their zones, consistent roles.
pub fn well_formed(session: &mut SessionState, engine: &Engine, story: &Story, excluded: &HashSet<MovieId>) -> Result<(), String> {
    let prefs = session.preferences();
    let length = engine.story_params.length;
    if story.events.len() != length {
        return Err(format!("{} events, expected {length}", story.events.len()));
    }
    let sorted = story.events.windows(2).all(|w| {
        if story.ascending {
            w[0].projection <= w[1].projection
        } else {
            w[0].projection >= w[1].projection
        }
    });
    if !sorted {
        return Err("events not monotone along the traversal".into());
    }
    let mut seen = HashSet::new();
    for e in &story.events {
        if !seen.insert(e.movie_id) {
            return Err(format!("movie {} repeated", e.movie_id.0));
        }
        if excluded.contains(&e.movie_id) {
            return Err(format!("thumbed-down movie {} recommended", e.movie_id.0));
        }
        if e.level1.group != Group::Recommendable {
            return Err(format!("movie {} is {:?}, not recommendable", e.movie_id.0, e.level1.group));
        }
        if !e.zone.contains(&story.layout, e.projection) {
            return Err(format!("movie {} outside its zone {:?}", e.movie_id.0, e.zone));
        }
        if prefs.familiar >= 1.0 && story.layout.familiarity_zone(e.projection) != FamiliarityZone::Familiar {
            return Err(format!("f = 1 but movie {} is outside the familiar zone", e.movie_id.0));
        }
        let familiar = story.layout.familiarity_zone(e.projection) == FamiliarityZone::Familiar;
        if e.roles.contains(&Role::Familiar) != familiar || e.roles.contains(&Role::Diverse) == familiar {
            return Err(format!("movie {} familiarity role mismatch", e.movie_id.0));
        }
        let untypical = e.projection.abs() <= story.layout.untypical_boundary;
        if e.roles.contains(&Role::Untypical) != untypical || e.roles.contains(&Role::Typical) == untypical {
            return Err(format!("movie {} typicality role mismatch", e.movie_id.0));
        }
        let sims = &e.level3.similar_liked;
        if sims.len() > 4 || sims.windows(2).any(|w| w[0].distance > w[1].distance) {
            return Err(format!("movie {} similar-liked list malformed", e.movie_id.0));
        }
        let model = session.model(engine);
        for s in sims {
            let idx = engine.movie_index(s.movie_id).map_err(|e| e.to_string())?;
            if model.groups.group_of(idx) != Group::Like {
                return Err(format!("similar movie {} not liked", s.movie_id.0));
            }
        }
    }
    let kind_ok = match story.structure {
        StructureKind::FamiliarToDiverse | StructureKind::DiverseToFamiliar => {
            story.zones.iter().any(|z| z.kind == ZoneKind::Familiar)
        }
        StructureKind::TypicalToUntypical | StructureKind::UntypicalToTypical => {
            story.zones.iter().any(|z| z.kind == ZoneKind::Untypical)
        }
    };
    if !kind_ok {
        return Err(format!("zones {:?} do not fit {:?}", story.zones.map(|z| z.kind), story.structure));
    }
    if story.anchor_left.projection >= story.anchor_right.projection {
        return Err("anchors not ordered left to right".into());
    }
    Ok(())
}

#[derive(Debug, Default, Clone)]
pub struct ConfigReport {
    pub stories: usize,
    pub typicality_sum: f64,
    pub events: usize,
    pub failures: Vec<String>,
}

impl ConfigReport {
    pub fn mean_typicality(&self) -> f64 {
        if self.events == 0 {
            0.0
        } else {
            self.typicality_sum / self.events as f64
        }
    }
}

/// Generates `total` stories, `per_session` at a time, cycling through
/// `users`. With `thumb_down`, the first two events of each session's first
/// story are thumbed down and must never reappear.
pub fn run_config(
    engine: &Engine,
    users: &[UserId],
    total: usize,
    per_session: usize,
    prefs: Preferences,
    thumb_down: bool,
    seed_base: u64,
) -> ConfigReport {
    let mut report = ConfigReport::default();
    let mut s = 0usize;
    while report.stories < total {
        let user = users[s % users.len()];
        let mut session = match SessionState::create(engine, user, seed_base + s as u64) {
            Ok(session) => session,
            Err(e) => {
                report.failures.push(format!("user {}: {e}", user.0));
                report.stories += 1;
                s += 1;
                continue;
            }
        };
        s += 1;
        if let Err(e) = session.set_preferences(prefs.familiar, prefs.typical) {
            report.failures.push(e.to_string());
            break;
        }
        let mut excluded = HashSet::new();
        for n in 0..per_session {
            if report.stories >= total {
                break;
            }
            report.stories += 1;
            let story = match session.next_story(engine) {
                Ok(story) => story,
                Err(e) => {
                    report.failures.push(format!("user {} story {n}: {e}", user.0));
                    break;
                }
            };
            if let Err(e) = check_story(&mut session, engine, &story, &excluded) {
                report.failures.push(format!("user {} story {n}: {e}", user.0));
            }
            for e in &story.events {
                report.typicality_sum += typicality(&story, e.projection);
                report.events += 1;
            }
            if thumb_down && n == 0 {
                for e in story.events.iter().take(2) {
                    if let Err(err) = session.apply_thumb(engine, e.movie_id, Thumb::Down) {
                        report.failures.push(err.to_string());
                    }
                    excluded.insert(e.movie_id);
                }
            }
        }
    }
    report
}
