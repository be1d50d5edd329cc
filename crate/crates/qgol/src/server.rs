//! Session server. Control is plain HTTP/JSON; `/sessions/{id}/stream` is a
//! websocket that receives one frame per simulated step. A frame is the
//! snapshot object with `t` and `parity` keys prepended; `parity` names the
//! partition the next step will use.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::body::Body;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use qgol_core::evolution::SimClock;
use qgol_core::state::{Cell, Configuration, Superposition};
use qgol_core::Complex64;
use serde::Deserialize;
use serde_json::json;
use tokio::sync::broadcast;

use crate::catalogue::catalogue_json;
use crate::driver::Driver;
use crate::report::{operator_checksum, verify_report};
use crate::scene::{gadget_cells, parse_scene, GadgetSpec, Scene};
use crate::snapshot::write_snapshot;

/// Largest `n` accepted by one advance request.
pub const MAX_ADVANCE: u64 = 100_000;

pub struct Session {
    pub scene: Scene,
    pub state: Superposition,
    pub clock: SimClock,
    pub u_checksum: String,
    frames: broadcast::Sender<String>,
}

impl Session {
    fn new(scene: Scene, u_checksum: String) -> Self {
        Session {
            state: scene.initial.clone(),
            clock: SimClock::new(scene.t0),
            scene,
            u_checksum,
            frames: broadcast::channel(1024).0,
        }
    }

    fn frame(&self) -> String {
        frame(self.clock, &self.state)
    }
}

pub fn frame(clock: SimClock, s: &Superposition) -> String {
    let snap = String::from_utf8(write_snapshot(s)).expect("utf8");
    format!(r#"{{"t":{},"parity":"{}",{}"#, clock.t, clock.parity().name(), &snap[1..])
}

type Shared = Arc<tokio::sync::Mutex<Session>>;

pub struct AppState {
    driver: Arc<Driver>,
    sessions: Mutex<HashMap<u64, Shared>>,
    next_id: AtomicU64,
    report: String,
    catalogue: String,
}

impl AppState {
    pub fn new(driver: Driver) -> crate::Result<Arc<Self>> {
        let report = serde_json::to_string(&verify_report(&driver.rule))?;
        let catalogue = serde_json::to_string(&catalogue_json()?)?;
        Ok(Arc::new(AppState {
            driver: Arc::new(driver),
            sessions: Mutex::default(),
            next_id: AtomicU64::new(1),
            report,
            catalogue,
        }))
    }

    fn session(&self, id: u64) -> Result<Shared, ApiError> {
        self.sessions.lock().expect("session table").get(&id).cloned().ok_or(ApiError::NotFound)
    }
}

#[derive(Debug)]
pub enum ApiError {
    NotFound,
    BadRequest(String),
    Conflict(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (code, msg) = match self {
            ApiError::NotFound => (StatusCode::NOT_FOUND, "no such session".to_string()),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::Conflict(m) => (StatusCode::CONFLICT, m),
        };
        (code, axum::Json(json!({ "error": msg }))).into_response()
    }
}

impl From<crate::Error> for ApiError {
    fn from(e: crate::Error) -> Self {
        ApiError::BadRequest(e.to_string())
    }
}

fn json_body(text: String) -> Response {
    Response::builder().header(header::CONTENT_TYPE, "application/json").body(Body::from(text)).expect("response")
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/snapshot", get(snapshot))
        .route("/sessions/{id}/advance", post(advance))
        .route("/sessions/{id}/mutate", post(mutate))
        .route("/sessions/{id}/reset", post(reset))
        .route("/sessions/{id}/stream", get(stream))
        .route("/rules/report", get(|State(s): State<Arc<AppState>>| async move { json_body(s.report.clone()) }))
        .route("/gadgets", get(|State(s): State<Arc<AppState>>| async move { json_body(s.catalogue.clone()) }))
        .with_state(state)
}

pub async fn serve(port: u16, driver: Driver) -> crate::Result<()> {
    let app = router(AppState::new(driver)?);
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app).await?;
    Ok(())
}

/// Body is a scene file.
async fn create(State(app): State<Arc<AppState>>, body: axum::body::Bytes) -> Result<Response, ApiError> {
    let scene = parse_scene(&body)?;
    let id = app.next_id.fetch_add(1, Ordering::Relaxed);
    let session = Session::new(scene, operator_checksum(app.driver.rule.operator()));
    let reply = json!({ "id": id, "t": session.clock.t, "u_checksum": session.u_checksum });
    app.sessions.lock().expect("session table").insert(id, Arc::new(tokio::sync::Mutex::new(session)));
    Ok((StatusCode::CREATED, axum::Json(reply)).into_response())
}

async fn snapshot(State(app): State<Arc<AppState>>, Path(id): Path<u64>) -> Result<Response, ApiError> {
    let session = app.session(id)?;
    let s = session.lock().await;
    Ok(json_body(String::from_utf8(write_snapshot(&s.state)).expect("utf8")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AdvanceRequest {
    n: u64,
}

/// Steps a locked session `n` times off the async runtime, broadcasting a
/// frame after each step. Returns the last frame.
async fn advance_locked(app: &AppState, s: &mut Session, n: u64) -> Result<String, ApiError> {
    if n > MAX_ADVANCE {
        return Err(ApiError::BadRequest(format!("n must be at most {MAX_ADVANCE}")));
    }
    let driver = app.driver.clone();
    let (mut state, mut clock, tx) = (s.state.clone(), s.clock, s.frames.clone());
    let (state, clock) = tokio::task::spawn_blocking(move || {
        for _ in 0..n {
            state = driver.step(&state, clock.parity());
            clock.t += 1;
            let _ = tx.send(frame(clock, &state));
        }
        (state, clock)
    })
    .await
    .expect("step task");
    s.state = state;
    s.clock = clock;
    Ok(s.frame())
}

async fn advance(
    State(app): State<Arc<AppState>>,
    Path(id): Path<u64>,
    body: axum::body::Bytes,
) -> Result<Response, ApiError> {
    let req: AdvanceRequest = serde_json::from_slice(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let session = app.session(id)?;
    let mut s = session.lock().await;
    Ok(json_body(advance_locked(&app, &mut s, req.n).await?))
}

/// Classical edit of a single-branch state. A multi-branch state must name
/// the branch (canonical order) to collapse onto first; the collapsed
/// branch keeps its phase but gets unit magnitude.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutateRequest {
    #[serde(default)]
    pub add: Vec<[i64; 3]>,
    #[serde(default)]
    pub remove: Vec<[i64; 3]>,
    #[serde(default)]
    pub gadgets: Vec<GadgetSpec>,
    pub collapse_to_branch: Option<usize>,
}

fn apply_edits(state: &Superposition, req: &MutateRequest) -> Result<Superposition, ApiError> {
    let (conf, amp) = match (state.len(), req.collapse_to_branch) {
        (0, None) => (Configuration::empty(), Complex64::new(1.0, 0.0)),
        (1, None) => state.iter().next().map(|(c, a)| (c.clone(), *a)).expect("one branch"),
        (n, None) => {
            return Err(ApiError::Conflict(format!(
                "state has {n} branches; editing needs collapse_to_branch"
            )))
        }
        (n, Some(i)) => {
            let (c, a) = state
                .iter()
                .nth(i)
                .ok_or_else(|| ApiError::BadRequest(format!("branch {i} out of range (0..{n})")))?;
            let unit = if a.norm() > 0.0 { a / a.norm() } else { Complex64::new(1.0, 0.0) };
            (c.clone(), unit)
        }
    };
    let remove = Configuration::new(req.remove.iter().map(|c| Cell::from_array(*c)));
    if !remove.difference(&conf).is_empty() {
        return Err(ApiError::BadRequest("removing an empty cell".into()));
    }
    let add = Configuration::new(req.add.iter().map(|c| Cell::from_array(*c)));
    let (gadget_cells, _) = gadget_cells(&req.gadgets)?;
    let kept = conf.difference(&remove);
    if !add.is_disjoint(&gadget_cells) || !kept.is_disjoint(&add) || !kept.is_disjoint(&gadget_cells) {
        return Err(ApiError::BadRequest("placement collision".into()));
    }
    let next = kept.union(&add).union(&gadget_cells);
    Ok([(next, amp)].into_iter().collect())
}

async fn mutate(
    State(app): State<Arc<AppState>>,
    Path(id): Path<u64>,
    body: axum::body::Bytes,
) -> Result<Response, ApiError> {
    let req: MutateRequest = serde_json::from_slice(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let session = app.session(id)?;
    let mut s = session.lock().await;
    s.state = apply_edits(&s.state, &req)?;
    let f = s.frame();
    let _ = s.frames.send(f.clone());
    Ok(json_body(f))
}

async fn reset(State(app): State<Arc<AppState>>, Path(id): Path<u64>) -> Result<Response, ApiError> {
    let session = app.session(id)?;
    let mut s = session.lock().await;
    s.state = s.scene.initial.clone();
    s.clock = SimClock::new(s.scene.t0);
    let f = s.frame();
    let _ = s.frames.send(f.clone());
    Ok(json_body(f))
}

async fn stream(
    State(app): State<Arc<AppState>>,
    Path(id): Path<u64>,
    ws: WebSocketUpgrade,
) -> Result<Response, ApiError> {
    let session = app.session(id)?;
    Ok(ws.on_upgrade(move |socket| stream_session(app, session, socket)))
}

/// Sends the current frame, then every broadcast frame. Incoming text
/// messages `{"n": k}` advance the session like the HTTP endpoint.
async fn stream_session(app: Arc<AppState>, session: Shared, mut socket: WebSocket) {
    let (first, mut rx) = {
        let s = session.lock().await;
        (s.frame(), s.frames.subscribe())
    };
    if socket.send(Message::text(first)).await.is_err() {
        return;
    }
    loop {
        tokio::select! {
            frame = rx.recv() => {
                let text = match frame {
                    Ok(f) => f,
                    Err(broadcast::error::RecvError::Lagged(k)) => json!({ "error": format!("{k} frames dropped") }).to_string(),
                    Err(broadcast::error::RecvError::Closed) => return,
                };
                if socket.send(Message::text(text)).await.is_err() {
                    return;
                }
            }
            msg = socket.recv() => {
                let Some(Ok(msg)) = msg else { return };
                let Message::Text(text) = msg else { continue };
                let reply = match serde_json::from_str::<AdvanceRequest>(text.as_str()) {
                    Ok(req) => {
                        let mut s = session.lock().await;
                        advance_locked(&app, &mut s, req.n).await.err()
                    }
                    Err(e) => Some(ApiError::BadRequest(e.to_string())),
                };
                if let Some(ApiError::BadRequest(m)) = reply {
                    if socket.send(Message::text(json!({ "error": m }).to_string())).await.is_err() {
                        return;
                    }
                }
            }
        }
    }
}
