//! HTTP endpoints for walkthrough sessions:
//!
//! - `GET /scenes` lists the builtin scenes
//! - `POST /sessions` with `{"scene": name}` opens a session
//! - `GET /sessions/{id}` returns the current `FrameState`
//! - `POST /sessions/{id}/step` with a `StepRequest` moves and returns the
//!   new `FrameState`
//!
//! Requests to one session are serialized by the state lock.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use knotcover_core::protocol::{FrameState, ProtocolError, Session, StepRequest};
use knotcover_core::scene::{builtin_scenes, Scene};

pub const DEFAULT_WIDTH: u32 = 320;
pub const DEFAULT_HEIGHT: u32 = 240;
const MAX_SIDE: u32 = 4096;

#[derive(Default)]
struct Inner {
    scenes: HashMap<String, Arc<Scene>>,
    sessions: HashMap<u64, Session>,
    next: u64,
}

#[derive(Clone, Default)]
pub struct AppState(Arc<Mutex<Inner>>);

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SceneInfo {
    pub name: String,
    pub worlds: Vec<String>,
    pub group_only: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OpenSession {
    pub scene: String,
    #[serde(default)]
    pub width: Option<u32>,
    #[serde(default)]
    pub height: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Opened {
    pub id: u64,
    pub state: FrameState,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(ErrorBody { error: self.1 })).into_response()
    }
}

impl From<ProtocolError> for ApiError {
    fn from(e: ProtocolError) -> Self {
        let code = match e {
            ProtocolError::BadRequest(_) | ProtocolError::Camera(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError(code, e.to_string())
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/scenes", get(scenes))
        .route("/sessions", post(open))
        .route("/sessions/{id}", get(current))
        .route("/sessions/{id}/step", post(step))
        .with_state(state)
}

async fn scenes() -> Json<Vec<SceneInfo>> {
    Json(
        builtin_scenes()
            .into_iter()
            .map(|s| SceneInfo {
                group_only: s.is_group_only(),
                worlds: s.worlds.into_iter().map(|w| w.name).collect(),
                name: s.name,
            })
            .collect(),
    )
}

fn lock(state: &AppState) -> std::sync::MutexGuard<'_, Inner> {
    // a panicked step leaves no half-written session behind
    state.0.lock().unwrap_or_else(|p| p.into_inner())
}

async fn open(State(state): State<AppState>, Json(req): Json<OpenSession>) -> Result<Json<Opened>, ApiError> {
    let (w, h) = (req.width.unwrap_or(DEFAULT_WIDTH), req.height.unwrap_or(DEFAULT_HEIGHT));
    if w == 0 || h == 0 || w > MAX_SIDE || h > MAX_SIDE {
        return Err(ApiError(StatusCode::BAD_REQUEST, format!("bad size {w}x{h}")));
    }
    let mut inner = lock(&state);
    let scene = match inner.scenes.get(&req.scene) {
        Some(s) => s.clone(),
        None => {
            let spec = builtin_scenes()
                .into_iter()
                .find(|s| s.name == req.scene)
                .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("unknown scene `{}`", req.scene)))?;
            let scene = Arc::new(Scene::build(&spec).map_err(|e| ApiError(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?);
            inner.scenes.insert(req.scene.clone(), scene.clone());
            scene
        }
    };
    let mut session = Session::new(scene, w, h)?;
    let first = session.state()?;
    let id = inner.next;
    inner.next += 1;
    inner.sessions.insert(id, session);
    Ok(Json(Opened { id, state: first }))
}

fn with_session<T>(
    state: &AppState,
    id: u64,
    f: impl FnOnce(&mut Session) -> Result<T, ProtocolError>,
) -> Result<T, ApiError> {
    let mut inner = lock(state);
    let s = inner
        .sessions
        .get_mut(&id)
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("no session {id}")))?;
    Ok(f(s)?)
}

async fn current(State(state): State<AppState>, Path(id): Path<u64>) -> Result<Json<FrameState>, ApiError> {
    with_session(&state, id, |s| s.state()).map(Json)
}

async fn step(
    State(state): State<AppState>,
    Path(id): Path<u64>,
    Json(req): Json<StepRequest>,
) -> Result<Json<FrameState>, ApiError> {
    with_session(&state, id, |s| s.step(&req)).map(Json)
}
