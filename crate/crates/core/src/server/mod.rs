//! JSON-over-HTTP game sessions for the browser playground.
//!
//! | method | path | body |
//! |---|---|---|
//! | POST | `/sessions` | `{left, right, rounds, human?, engine?, seed?}` |
//! | GET | `/sessions/{id}` | |
//! | POST | `/sessions/{id}/move` | `{side?, vertex, index?}` |
//! | GET | `/sessions/{id}/analysis` | |
//! | GET | `/graphs/hn/{n}` | |
//!
//! Errors carry `{"error": code, "reason": text}`.

mod session;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::cli::graph_from_spec;
use crate::graph::{generate_hn, Graph};
use crate::Limits;

pub use session::{CreateRequest, Engine, MoveReply, MoveRequest, Role, Session, Status};

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Idle time after which a session is dropped.
    pub ttl: Duration,
    pub limits: Limits,
    /// Largest graph order accepted for sessions and `/graphs/hn`.
    pub max_order: usize,
    /// Wall-clock budget for one engine computation.
    pub think_timeout: Duration,
    /// Allowed CORS origin; any origin when `None`.
    pub cors_origin: Option<String>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            ttl: Duration::from_secs(3600),
            limits: Limits::default(),
            max_order: 5000,
            think_timeout: Duration::from_secs(10),
            cors_origin: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub reason: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, reason: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.to_string(),
            reason: reason.into(),
        }
    }

    pub fn bad_request(code: &str, reason: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, reason)
    }

    pub fn not_found(reason: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not-found", reason)
    }

    pub fn conflict(code: &str, reason: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, code, reason)
    }

    pub fn too_large(code: &str, reason: impl Into<String>) -> Self {
        Self::new(StatusCode::PAYLOAD_TOO_LARGE, code, reason)
    }

    pub fn unprocessable(code: &str, reason: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, reason)
    }

    pub fn internal(code: &str, reason: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, code, reason)
    }

    fn timeout() -> Self {
        Self::new(
            StatusCode::SERVICE_UNAVAILABLE,
            "timeout",
            "the engine ran out of thinking time; retry the request or use smaller graphs",
        )
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.code, "reason": self.reason }))).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::bad_request("bad-request", e.body_text())
    }
}

struct Entry {
    session: Arc<tokio::sync::Mutex<Session>>,
    touched: Instant,
}

/// Shared server state: the session store and configuration.
#[derive(Clone)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<String, Entry>>>,
    config: Arc<ServerConfig>,
}

impl AppState {
    pub fn new(config: ServerConfig) -> Self {
        AppState {
            sessions: Arc::default(),
            config: Arc::new(config),
        }
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("store lock").len()
    }

    /// Drops sessions idle for longer than the TTL. Returns how many went.
    pub fn evict_expired(&self) -> usize {
        let ttl = self.config.ttl;
        let mut store = self.sessions.lock().expect("store lock");
        let before = store.len();
        store.retain(|_, e| e.touched.elapsed() <= ttl);
        before - store.len()
    }

    fn lookup(&self, id: &str) -> Result<Arc<tokio::sync::Mutex<Session>>, ApiError> {
        let ttl = self.config.ttl;
        let mut store = self.sessions.lock().expect("store lock");
        match store.get_mut(id) {
            Some(e) if e.touched.elapsed() <= ttl => {
                e.touched = Instant::now();
                Ok(e.session.clone())
            }
            Some(_) => {
                store.remove(id);
                Err(ApiError::not_found(format!("session {id} expired")))
            }
            None => Err(ApiError::not_found(format!("no session {id}"))),
        }
    }

    fn insert(&self, s: Session) {
        let id = s.id.clone();
        self.sessions.lock().expect("store lock").insert(
            id,
            Entry {
                session: Arc::new(tokio::sync::Mutex::new(s)),
                touched: Instant::now(),
            },
        );
    }

    fn graph(&self, spec: &str) -> Result<Graph, ApiError> {
        let limits = &self.config.limits;
        // Refuse oversized H_n before building it.
        if let Some(n) = spec.trim().strip_prefix("hn:").and_then(|n| n.parse::<u32>().ok()) {
            self.check_hn(n)?;
        }
        let g = graph_from_spec(spec, limits, false).map_err(|e| match e.code() {
            "cap-exceeded" => ApiError::too_large("cap-exceeded", e.message()),
            code => ApiError::bad_request(code, e.message()),
        })?;
        if g.order() > self.config.max_order {
            return Err(ApiError::too_large(
                "cap-exceeded",
                format!("graph {spec} has {} vertices; the limit is {}", g.order(), self.config.max_order),
            ));
        }
        Ok(g)
    }

    fn check_hn(&self, n: u32) -> Result<(), ApiError> {
        let order = (n as u128) * ((1u128 << n.min(100)) + 1);
        if n > self.config.limits.hn_cap || order > self.config.max_order as u128 {
            return Err(ApiError::too_large(
                "cap-exceeded",
                format!("H_{n} is larger than this server accepts"),
            ));
        }
        Ok(())
    }

    /// Runs engine work off the async threads with the think timeout.
    async fn think<T, F>(&self, f: F) -> Result<T, ApiError>
    where
        F: FnOnce() -> Result<T, ApiError> + Send + 'static,
        T: Send + 'static,
    {
        let task = tokio::task::spawn_blocking(f);
        match tokio::time::timeout(self.config.think_timeout, task).await {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => Err(ApiError::internal("engine-failed", e.to_string())),
            Err(_) => Err(ApiError::timeout()),
        }
    }
}

fn new_id() -> String {
    format!("{:032x}", rand::random::<u128>())
}

async fn create_session(
    State(state): State<AppState>,
    body: Result<Json<CreateRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let Json(req) = body?;
    let left = state.graph(&req.left)?;
    let right = state.graph(&req.right)?;
    let limits = state.config.limits.clone();
    let session = state
        .think(move || Session::create(new_id(), req, left, right, &limits))
        .await?;
    let snapshot = session.snapshot();
    state.insert(session);
    Ok((StatusCode::CREATED, Json(snapshot)))
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = state.lookup(&id)?;
    let s = s.lock().await;
    Ok(Json(s.snapshot()))
}

async fn submit_move(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<MoveRequest>, JsonRejection>,
) -> Result<Json<Value>, ApiError> {
    let s = state.lookup(&id)?;
    let Json(req) = body?;
    let mut guard = s.lock().await;
    if let Some(reply) = guard.replay(&req)? {
        return Ok(Json(move_body(reply, &guard, true)));
    }
    // Work on a copy so a timed-out engine leaves the session untouched.
    let mut work = guard.clone();
    let (work, reply) = state
        .think(move || {
            let reply = work.apply(&req)?;
            Ok((work, reply))
        })
        .await?;
    *guard = work;
    Ok(Json(move_body(reply, &guard, false)))
}

fn move_body(reply: MoveReply, s: &Session, replayed: bool) -> Value {
    let mut j = serde_json::to_value(&reply).expect("reply json");
    j["replayed"] = json!(replayed);
    j["session"] = s.snapshot();
    j
}

async fn analysis(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = state.lookup(&id)?;
    let snapshot = s.lock().await.clone();
    Ok(Json(state.think(move || Ok(snapshot.analysis())).await?))
}

async fn hn_graph(State(state): State<AppState>, Path(n): Path<String>) -> Result<Json<Value>, ApiError> {
    let n: u32 = n
        .parse()
        .map_err(|_| ApiError::bad_request("bad-request", format!("{n:?} is not a graph index")))?;
    state.check_hn(n)?;
    let g = generate_hn(n, state.config.limits.hn_cap).map_err(|e| ApiError::too_large("cap-exceeded", e.to_string()))?;
    Ok(Json(g.to_json()))
}

async fn fallback() -> ApiError {
    ApiError::not_found("no such endpoint")
}

pub fn router(state: AppState) -> Router {
    let origin = match &state.config.cors_origin {
        Some(o) => AllowOrigin::exact(HeaderValue::from_str(o).unwrap_or(HeaderValue::from_static("null"))),
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([axum::http::Method::GET, axum::http::Method::POST])
        .allow_headers([axum::http::header::CONTENT_TYPE]);
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/move", post(submit_move))
        .route("/sessions/{id}/analysis", get(analysis))
        .route("/graphs/hn/{n}", get(hn_graph))
        .fallback(fallback)
        .layer(cors)
        .with_state(state)
}

/// Binds `addr` and serves until the process ends, evicting idle sessions in
/// the background.
pub async fn serve(addr: &str, config: ServerConfig) -> std::io::Result<()> {
    let state = AppState::new(config);
    let sweeper = state.clone();
    let period = state.config.ttl.clamp(Duration::from_secs(1), Duration::from_secs(60));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            sweeper.evict_expired();
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}
