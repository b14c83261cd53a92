//! HTTP front end to the stroke state machine. A client reports pose events
//! and fingertip points; the service delimits the stroke, smooths it and
//! recognizes the character.
//!
//! | Method and path              | Body                      | Reply                                   |
//! |------------------------------|---------------------------|-----------------------------------------|
//! | `POST /sessions`             |                           | 201 `{id}`                              |
//! | `POST /sessions/{id}/pose`   | `{"raised_fingers": N}`   | 200 `{phase, point_count}`              |
//! | `POST /sessions/{id}/points` | `{"x", "y", "t"}`         | 200 `{phase, velocity, point_count}`    |
//! | `GET /sessions/{id}`         |                           | 200 `{phase, raw_trajectory, ...}`      |
//! | `DELETE /sessions/{id}`      |                           | 204                                     |
//!
//! Errors are `{"error": kind, "message": text}` with 404 for an unknown
//! session, 409 for points outside a stroke and 422 for a timestamp that does
//! not increase.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use airwrite_core::recognition::{RecognitionResult, Recognizer, TemplateRecognizer};
use airwrite_core::trajectory::{Phase, SmoothStats, SmoothingConfig, StrokeSession, TerminationConfig, TrajPoint};
use airwrite_core::Error;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};

pub const DEFAULT_PORT: u16 = 8790;

/// Settings shared by every session.
#[derive(Clone)]
pub struct ServiceConfig {
    pub termination: TerminationConfig,
    pub smoothing: SmoothingConfig,
    pub recognizer: Arc<dyn Recognizer>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            termination: TerminationConfig::default(),
            smoothing: SmoothingConfig::default(),
            recognizer: Arc::new(TemplateRecognizer::default()),
        }
    }
}

type SessionRef = Arc<Mutex<StrokeSession>>;

/// Session store. Each session has its own lock, so requests to one session
/// are handled in order and never wait on another session.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    config: ServiceConfig,
    sessions: Mutex<HashMap<String, SessionRef>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self {
            inner: Arc::new(Inner {
                config,
                sessions: Mutex::new(HashMap::new()),
                next_id: AtomicU64::new(1),
            }),
        }
    }

    pub fn session_count(&self) -> usize {
        self.inner.sessions.lock().unwrap().len()
    }

    fn create(&self) -> String {
        let id = format!("s{}", self.inner.next_id.fetch_add(1, Ordering::Relaxed));
        let c = &self.inner.config;
        let session = StrokeSession::new(c.termination, c.smoothing, c.recognizer.clone());
        self.inner
            .sessions
            .lock()
            .unwrap()
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        id
    }

    fn get(&self, id: &str) -> Result<SessionRef, ApiError> {
        self.inner
            .sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    fn remove(&self, id: &str) -> bool {
        self.inner.sessions.lock().unwrap().remove(id).is_some()
    }
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn not_found(id: &str) -> Self {
        Self {
            status: StatusCode::NOT_FOUND,
            body: ErrorBody {
                error: "UnknownSession",
                message: format!("no session {id:?}"),
            },
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::TrajectoryClosed => StatusCode::CONFLICT,
            Error::NonMonotonicTime | Error::InvalidParameter(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self {
            status,
            body: ErrorBody {
                error: e.kind(),
                message: e.to_string(),
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PoseEvent {
    pub raised_fingers: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PoseReply {
    pub phase: Phase,
    pub point_count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PointReply {
    pub phase: Phase,
    /// Speed of the step into this point, px/second; absent for the first.
    pub velocity: Option<f64>,
    pub point_count: usize,
}

#[derive(Debug, Serialize)]
pub struct SessionView {
    pub id: String,
    pub phase: Phase,
    pub raw_trajectory: Vec<TrajPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothed_trajectory: Option<Vec<TrajPoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<SmoothStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<RecognitionResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

async fn create_session(State(state): State<AppState>) -> (StatusCode, Json<Created>) {
    (StatusCode::CREATED, Json(Created { id: state.create() }))
}

async fn post_pose(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(ev): Json<PoseEvent>,
) -> Result<Json<PoseReply>, ApiError> {
    let session = state.get(&id)?;
    let mut s = session.lock().unwrap();
    s.set_pose(ev.raised_fingers);
    Ok(Json(PoseReply {
        phase: s.phase(),
        point_count: s.trajectory().len(),
    }))
}

async fn post_point(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(p): Json<TrajPoint>,
) -> Result<Json<PointReply>, ApiError> {
    let session = state.get(&id)?;
    let out = session.lock().unwrap().push(p)?;
    Ok(Json(PointReply {
        phase: out.phase,
        velocity: out.velocity,
        point_count: out.point_count,
    }))
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    let session = state.get(&id)?;
    let s = session.lock().unwrap();
    let outcome = s.last_outcome();
    Ok(Json(SessionView {
        id,
        phase: s.phase(),
        raw_trajectory: s.trajectory().points().to_vec(),
        smoothed_trajectory: outcome.map(|o| o.smoothed.clone()),
        smoothing: outcome.and_then(|o| o.smoothing),
        result: outcome.and_then(|o| o.result.clone()),
        error: outcome.and_then(|o| o.error.clone()),
    }))
}

async fn delete_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    if state.remove(&id) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::not_found(&id))
    }
}

/// True for `http(s)://localhost`, `127.0.0.1` and `[::1]` on any port.
pub fn is_local_origin(origin: &HeaderValue) -> bool {
    let Ok(origin) = origin.to_str() else {
        return false;
    };
    let Some(rest) = origin.strip_prefix("http://").or_else(|| origin.strip_prefix("https://")) else {
        return false;
    };
    let host = if rest.starts_with('[') {
        rest.split_inclusive(']').next().unwrap_or("")
    } else {
        rest.split(':').next().unwrap_or("")
    };
    matches!(host, "localhost" | "127.0.0.1" | "[::1]")
}

pub fn router(state: AppState) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(|origin, _| is_local_origin(origin)))
        .allow_methods([Method::GET, Method::POST, Method::DELETE])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/pose", post(post_pose))
        .route("/sessions/{id}/points", post(post_point))
        .layer(cors)
        .with_state(state)
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(AppState::new(config))).await
}
