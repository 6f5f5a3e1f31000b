//! HTTP/JSON API over a shared [`Engine`](storyrec_core::Engine) and
//! per-client interactive sessions.
//!
//! `GET /sessions/{id}/story` is not idempotent: each call generates the
//! session's next story and advances its history.

pub mod api;
pub mod error;
pub mod state;

use std::future::Future;

use axum::extract::{FromRequest, FromRequestParts, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use storyrec_core::lsm::Thumb;
use storyrec_core::{MovieId, SessionState, UserId};
use tokio::net::TcpListener;

use crate::api::{
    ApiDimensionView, ApiStory, CreateSession, FeedbackRequest, FeedbackResponse, HistoryResponse, MovieQuery,
    PreferencesRequest,
};
pub use crate::error::ApiError;
pub use crate::state::AppState;
use crate::state::{summarize, SessionHandle};

type ApiResult<T> = Result<T, ApiError>;

/// JSON body whose rejections become `bad_request` errors.
#[derive(FromRequest)]
#[from_request(via(axum::Json), rejection(ApiError))]
struct Body<T>(T);

#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Path), rejection(ApiError))]
struct Path<T>(T);

#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Query), rejection(ApiError))]
struct Query<T>(T);

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/story", get(next_story))
        .route("/sessions/{id}/feedback", post(feedback))
        .route("/sessions/{id}/preferences", post(preferences))
        .route("/sessions/{id}/dimension/{p}", get(dimension))
        .route("/sessions/{id}/log", get(session_log))
        .route("/movies/{id}", get(movie))
        .route("/users/{id}/history", get(history))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint") })
        .with_state(state)
}

/// Serves until `shutdown` resolves, then drains in-flight requests.
pub async fn serve(listener: TcpListener, state: AppState, shutdown: impl Future<Output = ()> + Send + 'static) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

fn session(state: &AppState, id: &str) -> ApiResult<SessionHandle> {
    state.get(id).ok_or_else(|| ApiError::unknown_session(id))
}

fn parse_thumb(raw: &str) -> ApiResult<Thumb> {
    match raw {
        "up" => Ok(Thumb::Up),
        "down" => Ok(Thumb::Down),
        other => Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_thumb",
            format!("thumb must be \"up\" or \"down\", got {other:?}"),
        )),
    }
}

async fn health(State(state): State<AppState>) -> impl IntoResponse {
    let ds = state.engine().dataset();
    Json(serde_json::json!({
        "status": "ok",
        "users": ds.user_count(),
        "movies": ds.movie_count(),
        "k": state.engine().space().k,
        "sessions": state.session_count(),
    }))
}

async fn create_session(State(state): State<AppState>, Body(req): Body<CreateSession>) -> ApiResult<impl IntoResponse> {
    let seed = req.seed.unwrap_or_else(|| uuid::Uuid::new_v4().as_u64_pair().0);
    let s = SessionState::create(state.engine(), UserId(req.user_id), seed)?;
    let (id, handle) = state.insert(s);
    let id = id.to_string();
    let summary = summarize(state.engine(), &id, &handle.lock());
    Ok((StatusCode::CREATED, Json(summary)))
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let handle = session(&state, &id)?;
    let s = handle.lock();
    Ok(Json(summarize(state.engine(), &id, &s)))
}

async fn next_story(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<ApiStory>> {
    let handle = session(&state, &id)?;
    let engine = state.engine().clone();
    tokio::task::spawn_blocking(move || {
        let mut s = handle.lock();
        let index = s.stories_generated();
        let story = s.next_story(&engine)?;
        ApiStory::new(&id, index, &story).map_err(|e| ApiError::internal(e.to_string()))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?
    .map(Json)
}

async fn feedback(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Body(req): Body<FeedbackRequest>,
) -> ApiResult<Json<FeedbackResponse>> {
    let handle = session(&state, &id)?;
    let thumb = parse_thumb(&req.thumb)?;
    let engine = state.engine().clone();
    tokio::task::spawn_blocking(move || {
        let mut s = handle.lock();
        let summary = s.apply_thumb(&engine, MovieId(req.movie_id), thumb)?;
        Ok(FeedbackResponse {
            movie_id: summary.movie_id,
            thumb: req.thumb,
            weight: summary.weight,
            group: summary.group,
            session: summarize(&engine, &id, &s),
        })
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?
    .map(Json)
}

async fn preferences(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Body(req): Body<PreferencesRequest>,
) -> ApiResult<impl IntoResponse> {
    let handle = session(&state, &id)?;
    let mut s = handle.lock();
    let current = s.preferences();
    s.set_preferences(req.f.unwrap_or(current.familiar), req.t.unwrap_or(current.typical))?;
    Ok(Json(summarize(state.engine(), &id, &s)))
}

async fn dimension(State(state): State<AppState>, Path((id, p)): Path<(String, usize)>) -> ApiResult<Json<ApiDimensionView>> {
    let handle = session(&state, &id)?;
    let engine = state.engine().clone();
    tokio::task::spawn_blocking(move || {
        let mut s = handle.lock();
        let model = s.model(&engine).clone();
        let view = engine.dimension_view(s.profile(), &model, p)?;
        ApiDimensionView::new(&view).map_err(|e| ApiError::internal(e.to_string()))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?
    .map(Json)
}

async fn session_log(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let handle = session(&state, &id)?;
    let log = handle.lock().export_log();
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], log))
}

async fn movie(
    State(state): State<AppState>,
    Path(id): Path<u32>,
    Query(q): Query<MovieQuery>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(state.engine().movie_details(MovieId(id), q.user.map(UserId))?))
}

async fn history(State(state): State<AppState>, Path(id): Path<u32>) -> ApiResult<Json<HistoryResponse>> {
    let movies = state.engine().history(UserId(id))?;
    Ok(Json(HistoryResponse {
        user_id: UserId(id),
        count: movies.len(),
        movies,
    }))
}
