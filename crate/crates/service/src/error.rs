use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use storyrec_core::{Error, StoryError};

/// Error body returned by every endpoint: a stable machine `code` plus a
/// human-readable `message`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn unknown_session(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_session", format!("unknown session {id}"))
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let (status, code) = match &e {
            Error::UnknownUser(_) => (StatusCode::NOT_FOUND, "unknown_user"),
            Error::UnknownMovie(_) => (StatusCode::NOT_FOUND, "unknown_movie"),
            Error::UnknownDimension { .. } => (StatusCode::NOT_FOUND, "unknown_dimension"),
            Error::Story(StoryError::InvalidPreference { .. }) => (StatusCode::BAD_REQUEST, "out_of_range"),
            Error::Story(StoryError::PoolExhausted { .. }) => (StatusCode::CONFLICT, "pool_exhausted"),
            Error::Story(StoryError::NoDimensions) => (StatusCode::CONFLICT, "no_dimensions"),
            Error::Params(_) => (StatusCode::BAD_REQUEST, "bad_request"),
            Error::Dataset(_) | Error::Factorize(_) | Error::Snapshot(_) | Error::Replay { .. } => {
                (StatusCode::INTERNAL_SERVER_ERROR, "internal")
            }
        };
        ApiError::new(status, code, message)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::bad_request(r.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(r: PathRejection) -> Self {
        Self::bad_request(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        Self::bad_request(r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(code = self.code, "{}", self.message);
        }
        (self.status, Json(self)).into_response()
    }
}
