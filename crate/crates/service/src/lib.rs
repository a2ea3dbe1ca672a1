//! HTTP/JSON front end over `omt-core`, versioned under `/v1`.

use std::collections::HashMap;
use std::future::Future;
use std::sync::{Arc, Mutex as StdMutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{FromRequest, Path, Request, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use tokio::net::TcpListener;
use tokio::sync::Mutex;
use tower_http::trace::TraceLayer;

use omt_core::api::{codes, ErrorBody, Health};
use omt_core::classify::classify_model;
use omt_core::io::json::read_json;
use omt_core::io::lp::{parse_lp, write_lp};
use omt_core::io::owl::{write_owl, OntologyDescriptor};
use omt_core::omt::session::SessionDocument;
use omt_core::omt::{Answer, Nav, OmtTree, Session, SessionError};
use omt_core::suite::{run_suite, SuiteConfig};

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(24 * 60 * 60);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub port: u16,
    pub session_ttl: Duration,
}

impl Default for Config {
    fn default() -> Self {
        Config { port: DEFAULT_PORT, session_ttl: DEFAULT_SESSION_TTL }
    }
}

impl Config {
    /// Reads `OMT_PORT` and `OMT_SESSION_TTL_SECONDS`, keeping defaults for
    /// unset variables.
    pub fn from_env() -> Result<Config, String> {
        Config::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Config, String> {
        let mut c = Config::default();
        if let Some(p) = get("OMT_PORT") {
            c.port = p.parse().map_err(|_| format!("OMT_PORT: `{p}` is not a port number"))?;
        }
        if let Some(t) = get("OMT_SESSION_TTL_SECONDS") {
            let secs: u64 = t.parse().map_err(|_| format!("OMT_SESSION_TTL_SECONDS: `{t}` is not a number of seconds"))?;
            c.session_ttl = Duration::from_secs(secs);
        }
        Ok(c)
    }
}

struct Slot {
    session: Arc<Mutex<Session>>,
    last_used: Instant,
}

/// Live sessions keyed by id. Each session sits behind its own lock, so
/// writes to one session are serialized while others proceed.
pub struct SessionStore {
    ttl: Duration,
    slots: StdMutex<HashMap<String, Slot>>,
}

impl SessionStore {
    pub fn new(ttl: Duration) -> Self {
        SessionStore { ttl, slots: StdMutex::new(HashMap::new()) }
    }

    fn slots(&self) -> std::sync::MutexGuard<'_, HashMap<String, Slot>> {
        self.slots.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn insert(&self, session: Session) -> Arc<Mutex<Session>> {
        let id = session.id().to_string();
        let handle = Arc::new(Mutex::new(session));
        self.slots().insert(id, Slot { session: handle.clone(), last_used: Instant::now() });
        handle
    }

    /// Looks up a live session and marks it used.
    pub fn get(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        let now = Instant::now();
        let mut slots = self.slots();
        let slot = slots.get_mut(id)?;
        if now.duration_since(slot.last_used) > self.ttl {
            slots.remove(id);
            return None;
        }
        slot.last_used = now;
        Some(slot.session.clone())
    }

    pub fn remove(&self, id: &str) -> bool {
        self.slots().remove(id).is_some()
    }

    pub fn purge_expired_at(&self, now: Instant) -> usize {
        let mut slots = self.slots();
        let before = slots.len();
        slots.retain(|_, s| now.saturating_duration_since(s.last_used) <= self.ttl);
        before - slots.len()
    }

    pub fn len(&self) -> usize {
        self.slots().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone)]
pub struct AppState {
    pub tree: Arc<OmtTree>,
    pub sessions: Arc<SessionStore>,
}

impl AppState {
    pub fn new(tree: OmtTree, session_ttl: Duration) -> Self {
        AppState { tree: Arc::new(tree), sessions: Arc::new(SessionStore::new(session_ttl)) }
    }
}

/// Error response carrying the shared envelope.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, body: ErrorBody::new(code, message) }
    }

    fn not_found(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, codes::SESSION_NOT_FOUND, format!("no live session `{id}`"))
    }

    fn session(e: SessionError) -> Self {
        let status = match &e {
            SessionError::Complete | SessionError::NothingToUndo => StatusCode::CONFLICT,
            SessionError::Unfilled(_) | SessionError::NoVariables | SessionError::Invalid(_) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            _ => StatusCode::BAD_REQUEST,
        };
        let mut body = ErrorBody::new(e.code(), e.to_string());
        if let SessionError::Json(j) = &e {
            body = body.with_path(j.path.clone());
        }
        ApiError { status, body }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

/// JSON body whose decoding errors name the offending path.
pub struct ApiJson<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for ApiJson<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        let bytes = Bytes::from_request(req, state)
            .await
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, codes::PARSE_ERROR, e.body_text()))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, codes::PARSE_ERROR, "body is not UTF-8"))?;
        read_json(text).map(ApiJson).map_err(|e| ApiError {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody::new(codes::PARSE_ERROR, e.message).with_path(e.path),
        })
    }
}

fn json_text(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    let v1 = Router::new()
        .route("/health", get(health))
        .route("/omt", get(omt))
        .route("/sessions", post(create_session))
        .route("/sessions/import", post(import_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/answers", post(answer))
        .route("/sessions/{id}/back", post(back))
        .route("/sessions/{id}/model.lp", get(model_lp))
        .route("/sessions/{id}/export", get(export))
        .route("/classify", post(classify))
        .route("/ontology.owl", get(ontology))
        .route("/verify-encodings", post(verify_encodings));
    Router::new().nest("/v1", v1).layer(TraceLayer::new_for_http()).with_state(state)
}

async fn health(State(s): State<AppState>) -> Json<Health> {
    Json(Health { status: "ok".into(), tree_version: s.tree.version().into(), sessions: s.sessions.len() })
}

async fn omt(State(s): State<AppState>) -> Response {
    json_text(s.tree.to_json())
}

async fn create_session(State(s): State<AppState>) -> Response {
    let session = Session::start(s.tree.clone());
    let view = session.view();
    s.sessions.insert(session);
    tracing::info!(id = %view.id, "session created");
    (StatusCode::CREATED, Json(view)).into_response()
}

async fn import_session(State(s): State<AppState>, ApiJson(doc): ApiJson<SessionDocument>) -> ApiResult<Response> {
    if s.sessions.get(&doc.id).is_some() {
        return Err(ApiError::new(StatusCode::CONFLICT, "SESSION_EXISTS", format!("session `{}` is live", doc.id)));
    }
    let session = Session::import(s.tree.clone(), &doc).map_err(|e| {
        let step = e.step;
        let mut err = ApiError::session(e.error);
        err.body.step = Some(step);
        err
    })?;
    let view = session.view();
    s.sessions.insert(session);
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

fn lookup(s: &AppState, id: &str) -> ApiResult<Arc<Mutex<Session>>> {
    s.sessions.get(id).ok_or_else(|| ApiError::not_found(id))
}

async fn get_session(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let h = lookup(&s, &id)?;
    let view = h.lock().await.view();
    Ok(Json(view).into_response())
}

async fn delete_session(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    if s.sessions.remove(&id) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::not_found(&id))
    }
}

async fn answer(State(s): State<AppState>, Path(id): Path<String>, ApiJson(a): ApiJson<Answer>) -> ApiResult<Response> {
    let h = lookup(&s, &id)?;
    let mut session = h.lock().await;
    let step = session.transcript().len();
    session.answer(a).map_err(|e| {
        let mut err = ApiError::session(e);
        err.body.step = Some(step);
        err
    })?;
    Ok(Json(session.view()).into_response())
}

async fn back(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let h = lookup(&s, &id)?;
    let mut session = h.lock().await;
    session.answer(Answer::Nav(Nav::Back)).map_err(ApiError::session)?;
    Ok(Json(session.view()).into_response())
}

async fn model_lp(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let h = lookup(&s, &id)?;
    let model = h.lock().await.emit_model().map_err(ApiError::session)?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], write_lp(&model)).into_response())
}

async fn export(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let h = lookup(&s, &id)?;
    let text = h.lock().await.export_json();
    Ok(json_text(text))
}

/// Classification JSON for an LP document, shared with the CLI so both
/// return the same bytes.
pub fn classify_text(lp: &str) -> Result<String, ErrorBody> {
    if lp.trim().is_empty() {
        return Err(ErrorBody::new(codes::PARSE_ERROR, "empty model text"));
    }
    let m = parse_lp(lp).map_err(|e| ErrorBody::new(codes::PARSE_ERROR, e.to_string()).at(e.line, e.column))?;
    let report = m.validate();
    if !report.is_ok() {
        return Err(ErrorBody::new(codes::VALIDATION_FAILED, report.to_string().trim_end()));
    }
    let result = classify_model(&m).map_err(|e| ErrorBody::new(codes::VALIDATION_FAILED, e.to_string()))?;
    Ok(result.to_json())
}

async fn classify(body: Bytes) -> ApiResult<Response> {
    let text = std::str::from_utf8(&body)
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, codes::PARSE_ERROR, "body is not UTF-8"))?;
    match classify_text(text) {
        Ok(json) => Ok(json_text(json)),
        Err(body) => {
            let status =
                if body.code == codes::PARSE_ERROR { StatusCode::BAD_REQUEST } else { StatusCode::UNPROCESSABLE_ENTITY };
            Err(ApiError { status, body })
        }
    }
}

async fn ontology() -> ApiResult<Response> {
    let owl = write_owl(&OntologyDescriptor::default())
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, codes::INTERNAL, e.to_string()))?;
    Ok(([(header::CONTENT_TYPE, "application/owl+xml")], owl).into_response())
}

async fn verify_encodings(ApiJson(cfg): ApiJson<SuiteConfig>) -> ApiResult<Response> {
    if cfg.max_binaries == 0 || cfg.max_binaries > 12 {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, codes::PARSE_ERROR, "max_binaries must be between 1 and 12"));
    }
    let report = tokio::task::spawn_blocking(move || run_suite(&cfg))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, codes::INTERNAL, e.to_string()))?;
    Ok(Json(report).into_response())
}

/// Purges expired sessions every `every` until the runtime shuts down.
pub fn spawn_reaper(store: Arc<SessionStore>, every: Duration) -> tokio::task::JoinHandle<()> {
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(every);
        loop {
            tick.tick().await;
            let n = store.purge_expired_at(Instant::now());
            if n > 0 {
                tracing::info!(purged = n, "expired sessions removed");
            }
        }
    })
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let reaper = spawn_reaper(state.sessions.clone(), Duration::from_secs(60));
    let result = axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await;
    reaper.abort();
    result
}
