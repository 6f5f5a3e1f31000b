#![allow(dead_code)]

#[path = "../../../core/tests/oracle/mod.rs"]
pub mod oracle;

use std::sync::OnceLock;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use storyrec_core::{Engine, ModelParams, RatingDataset, StoryParams};
use storyrec_service::{router, AppState};
use tower::ServiceExt;

pub fn engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(|| {
        let ds = RatingDataset::from_triples(&oracle::synthetic(60, 200, 0.25, 5)).unwrap();
        let params = ModelParams {
            k: 10,
            ..ModelParams::default()
        };
        Engine::build(ds, params, StoryParams::default()).unwrap()
    })
}

pub fn app() -> (AppState, Router) {
    let state = AppState::new(engine().clone());
    (state.clone(), router(state))
}

pub async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, bytes) = call_raw(app, method, uri, body.map(|b| b.to_string())).await;
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into_owned()))
    };
    (status, value)
}

pub async fn call_raw(app: &Router, method: Method, uri: &str, body: Option<String>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(body.map_or_else(Body::empty, Body::from)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

pub async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    call(app, Method::GET, uri, None).await
}

pub async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    call(app, Method::POST, uri, Some(body)).await
}

/// Creates a session and returns its id.
pub async fn session(app: &Router, user: u32, seed: u64) -> String {
    let (status, body) = post(app, "/sessions", serde_json::json!({"user_id": user, "seed": seed})).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body["session_id"].as_str().unwrap().to_string()
}

pub const SCHEMAS: [(&str, &str); 7] = [
    ("story", include_str!("../../schemas/story.json")),
    ("session", include_str!("../../schemas/session.json")),
    ("feedback", include_str!("../../schemas/feedback.json")),
    ("dimension_view", include_str!("../../schemas/dimension_view.json")),
    ("movie", include_str!("../../schemas/movie.json")),
    ("history", include_str!("../../schemas/history.json")),
    ("error", include_str!("../../schemas/error.json")),
];

/// Validation errors of `instance` against the named schema, joined.
pub fn schema_errors(name: &str, instance: &Value) -> Option<String> {
    let (_, raw) = SCHEMAS.iter().find(|(n, _)| *n == name).unwrap_or_else(|| panic!("no schema {name}"));
    let schema: Value = serde_json::from_str(raw).unwrap();
    let validator = jsonschema::options().should_validate_formats(true).build(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    if errors.is_empty() {
        None
    } else {
        Some(errors.join("; "))
    }
}

pub fn assert_schema(name: &str, instance: &Value) {
    if let Some(e) = schema_errors(name, instance) {
        panic!("{name} response violates schema: {e}\n{instance}");
    }
}

/// Story body without the per-request identifiers.
pub fn story_content(story: &Value) -> Value {
    let mut v = story.clone();
    let obj = v.as_object_mut().unwrap();
    obj.remove("story_id");
    obj.remove("session_id");
    v
}

pub fn event_ids(story: &Value) -> Vec<u64> {
    story["events"].as_array().unwrap().iter().map(|e| e["movie_id"].as_u64().unwrap()).collect()
}

#[derive(Debug, Default)]
pub struct DriveReport {
    pub sessions: usize,
    pub stories: usize,
    pub schema_failures: Vec<String>,
    pub mismatches: Vec<String>,
    pub duplicate_streams: usize,
    pub engine_changed: bool,
}

impl DriveReport {
    pub fn ok(&self) -> bool {
        self.sessions > 0
            && self.schema_failures.is_empty()
            && self.mismatches.is_empty()
            && self.duplicate_streams == 0
            && !self.engine_changed
    }
}

const SCRIPT_PREFS: (f64, f64) = (0.7, 0.3);

/// Runs the fixed script against one session over HTTP: two stories, a
/// thumb-down on the first event, a preference change, two more stories.
async fn drive_one(app: Router, user: u32, seed: u64) -> Result<(String, Vec<Value>, Vec<String>), String> {
    let mut schema = Vec::new();
    let (status, created) = post(&app, "/sessions", serde_json::json!({"user_id": user, "seed": seed})).await;
    if status != StatusCode::CREATED {
        return Err(format!("create user {user}: {status} {created}"));
    }
    let id = created["session_id"].as_str().unwrap_or_default().to_string();
    let mut stories = Vec::new();
    for step in 0..4 {
        if step == 2 {
            let first = event_ids(&stories[0])[0];
            let (s, b) = post(&app, &format!("/sessions/{id}/feedback"), serde_json::json!({"movie_id": first, "thumb": "down"})).await;
            if s != StatusCode::OK {
                return Err(format!("feedback: {s} {b}"));
            }
            schema.extend(schema_errors("feedback", &b));
            let (s, b) = post(&app, &format!("/sessions/{id}/preferences"), serde_json::json!({"f": SCRIPT_PREFS.0, "t": SCRIPT_PREFS.1})).await;
            if s != StatusCode::OK {
                return Err(format!("preferences: {s} {b}"));
            }
            schema.extend(schema_errors("session", &b));
        }
        let (s, story) = get(&app, &format!("/sessions/{id}/story")).await;
        if s != StatusCode::OK {
            return Err(format!("story {step}: {s} {story}"));
        }
        schema.extend(schema_errors("story", &story));
        stories.push(story);
    }
    Ok((id, stories, schema))
}

/// The same script run directly against the engine, serialized the way the
/// service would.
fn reference(engine: &Engine, id: &str, user: u32, seed: u64) -> Vec<Value> {
    use storyrec_core::lsm::Thumb;
    let mut s = storyrec_core::SessionState::create(engine, storyrec_core::UserId(user), seed).unwrap();
    let mut out = Vec::new();
    for step in 0..4u64 {
        if step == 2 {
            let first = storyrec_core::MovieId(out.first().map(|v: &Value| event_ids(v)[0]).unwrap() as u32);
            s.apply_thumb(engine, first, Thumb::Down).unwrap();
            s.set_preferences(SCRIPT_PREFS.0, SCRIPT_PREFS.1).unwrap();
        }
        let story = s.next_story(engine).unwrap();
        out.push(serde_json::to_value(storyrec_service::api::ApiStory::new(id, step, &story).unwrap()).unwrap());
    }
    out
}

/// Drives `n` sessions concurrently with distinct seeds and checks each
/// stream against an isolated sequential run.
pub async fn drive_sessions(app: &Router, engine: &Engine, users: &[u32], n: usize) -> DriveReport {
    let probe = |e: &Engine| {
        let mut s = storyrec_core::SessionState::create(e, storyrec_core::UserId(users[0]), 0).unwrap();
        serde_json::to_string(&s.next_story(e).unwrap()).unwrap()
    };
    let before = probe(engine);
    let tasks: Vec<_> = (0..n)
        .map(|k| {
            let app = app.clone();
            let user = users[k % users.len()];
            let seed = 10_000 + k as u64;
            tokio::spawn(async move { (user, seed, drive_one(app, user, seed).await) })
        })
        .collect();
    let mut report = DriveReport::default();
    let mut streams = std::collections::HashSet::new();
    for t in tasks {
        let (user, seed, result) = t.await.unwrap();
        report.sessions += 1;
        match result {
            Err(e) => report.mismatches.push(e),
            Ok((id, stories, schema)) => {
                report.stories += stories.len();
                report.schema_failures.extend(schema);
                if reference(engine, &id, user, seed) != stories {
                    report.mismatches.push(format!("session {id} (user {user}, seed {seed}) diverged from its isolated run"));
                }
                let stream: Vec<Vec<u64>> = stories.iter().map(event_ids).collect();
                if !streams.insert(stream) {
                    report.duplicate_streams += 1;
                }
            }
        }
    }
    report.engine_changed = probe(engine) != before;
    report
}

/// Calls every endpoint once, success and error paths, and returns the
/// schema violations found.
pub async fn schema_sweep(app: &Router, user: u32) -> Vec<String> {
    let mut failures = Vec::new();
    let mut check = |name: &str, what: &str, status: StatusCode, want: StatusCode, body: &Value| {
        if status != want {
            failures.push(format!("{what}: status {status}, expected {want}: {body}"));
        } else if let Some(e) = schema_errors(name, body) {
            failures.push(format!("{what}: {e}"));
        }
    };
    let (s, created) = post(app, "/sessions", serde_json::json!({"user_id": user, "seed": 3})).await;
    check("session", "create session", s, StatusCode::CREATED, &created);
    let Some(id) = created["session_id"].as_str().map(String::from) else {
        return failures;
    };
    let (s, b) = get(app, &format!("/sessions/{id}")).await;
    check("session", "get session", s, StatusCode::OK, &b);
    let (s, story) = get(app, &format!("/sessions/{id}/story")).await;
    check("story", "story", s, StatusCode::OK, &story);
    let movie = story["events"][0]["movie_id"].as_u64().unwrap_or(1);
    let dim = story["dimension"].as_u64().unwrap_or(0);
    let (s, b) = post(app, &format!("/sessions/{id}/feedback"), serde_json::json!({"movie_id": movie, "thumb": "up"})).await;
    check("feedback", "feedback", s, StatusCode::OK, &b);
    let (s, b) = post(app, &format!("/sessions/{id}/preferences"), serde_json::json!({"f": 0.2, "t": 0.8})).await;
    check("session", "preferences", s, StatusCode::OK, &b);
    let (s, b) = get(app, &format!("/sessions/{id}/dimension/{dim}")).await;
    check("dimension_view", "dimension view", s, StatusCode::OK, &b);
    let (s, b) = get(app, &format!("/movies/{movie}?user={user}")).await;
    check("movie", "movie", s, StatusCode::OK, &b);
    let (s, b) = get(app, &format!("/movies/{movie}")).await;
    check("movie", "movie without user", s, StatusCode::OK, &b);
    let (s, b) = get(app, &format!("/users/{user}/history")).await;
    check("history", "history", s, StatusCode::OK, &b);

    let errors = [
        (Method::GET, "/sessions/00000000-0000-0000-0000-000000000000/story".to_string(), None, StatusCode::NOT_FOUND),
        (Method::GET, "/sessions/not-a-uuid".to_string(), None, StatusCode::NOT_FOUND),
        (Method::POST, "/sessions".to_string(), Some(serde_json::json!({"user_id": 999_999})), StatusCode::NOT_FOUND),
        (Method::POST, "/sessions".to_string(), Some(serde_json::json!({"user": "x"})), StatusCode::BAD_REQUEST),
        (
            Method::POST,
            format!("/sessions/{id}/feedback"),
            Some(serde_json::json!({"movie_id": movie, "thumb": "sideways"})),
            StatusCode::BAD_REQUEST,
        ),
        (
            Method::POST,
            format!("/sessions/{id}/feedback"),
            Some(serde_json::json!({"movie_id": 99_999_999u64, "thumb": "up"})),
            StatusCode::NOT_FOUND,
        ),
        (Method::POST, format!("/sessions/{id}/preferences"), Some(serde_json::json!({"f": 1.5})), StatusCode::BAD_REQUEST),
        (Method::GET, format!("/sessions/{id}/dimension/9999"), None, StatusCode::NOT_FOUND),
        (Method::GET, "/movies/99999999".to_string(), None, StatusCode::NOT_FOUND),
        (Method::GET, "/users/999999/history".to_string(), None, StatusCode::NOT_FOUND),
        (Method::GET, "/nowhere".to_string(), None, StatusCode::NOT_FOUND),
    ];
    for (method, uri, body, want) in errors {
        let what = format!("{method} {uri}");
        let (s, b) = call(app, method, &uri, body).await;
        check("error", &what, s, want, &b);
    }

    let (s, log) = call_raw(app, Method::GET, &format!("/sessions/{id}/log"), None).await;
    let text = String::from_utf8_lossy(&log);
    if s != StatusCode::OK || text.lines().any(|l| serde_json::from_str::<Value>(l).is_err()) {
        failures.push(format!("log: status {s} or a line that is not JSON"));
    }
    failures
}
