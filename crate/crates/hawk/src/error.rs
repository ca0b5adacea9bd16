use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;
use thiserror::Error;

use hawk_core::CoreError;
use hawk_replay::{ReplayError, SteamId};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("missing or wrong bearer token")]
    Unauthorized,
    #[error("no model bundle is loaded")]
    ModelNotLoaded,
    #[error("unknown report {0}")]
    UnknownReport(String),
    #[error("player {steam_id} is not flagged in report {report_id}")]
    NotFlagged { report_id: String, steam_id: SteamId },
    #[error("player {steam_id} of report {report_id} is already decided")]
    AlreadyDecided { report_id: String, steam_id: SteamId },
    #[error("no threshold reaches recall {recall}")]
    InfeasibleConstraint { recall: f64 },
    #[error("corrupt state: {0}")]
    Corrupt(String),
    #[error("io error at {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl ServiceError {
    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        ServiceError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ServiceError::Schema { .. } => "SchemaError",
            ServiceError::BadRequest(_) => "BadRequest",
            ServiceError::Unauthorized => "Unauthorized",
            ServiceError::ModelNotLoaded => "ModelNotLoaded",
            ServiceError::UnknownReport(_) => "UnknownReport",
            ServiceError::NotFlagged { .. } => "NotFlagged",
            ServiceError::AlreadyDecided { .. } => "AlreadyDecided",
            ServiceError::InfeasibleConstraint { .. } => "InfeasibleConstraint",
            ServiceError::Corrupt(_) => "CorruptState",
            ServiceError::Io { .. } => "Io",
            ServiceError::Core(_) => "Internal",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::Schema { .. } | ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::Unauthorized => StatusCode::UNAUTHORIZED,
            ServiceError::ModelNotLoaded => StatusCode::SERVICE_UNAVAILABLE,
            ServiceError::UnknownReport(_) | ServiceError::NotFlagged { .. } => StatusCode::NOT_FOUND,
            ServiceError::AlreadyDecided { .. } => StatusCode::CONFLICT,
            ServiceError::InfeasibleConstraint { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Core(e) if e.is_validation() => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl From<ReplayError> for ServiceError {
    fn from(e: ReplayError) -> Self {
        match e {
            ReplayError::Schema { path, message } | ReplayError::Consistency { path, message } => {
                ServiceError::Schema { path, message }
            }
            ReplayError::Config(m) => ServiceError::BadRequest(m),
            ReplayError::Io { path, source } => ServiceError::Io {
                path,
                message: source.to_string(),
            },
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.kind(), "message": self.to_string() });
        if let ServiceError::Schema { path, .. } = &self {
            body["path"] = json!(path);
        }
        (self.status(), Json(body)).into_response()
    }
}
