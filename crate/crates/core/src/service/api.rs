//! HTTP API with server-sent event streams, for the operator console.
//!
//! | method | path                          |                                   |
//! |--------|-------------------------------|-----------------------------------|
//! | POST   | /sessions                     | create (domain, problem, config)  |
//! | GET    | /sessions                     | list ids                          |
//! | GET    | /sessions/{id}                | status                            |
//! | GET    | /sessions/{id}/events         | event stream, history then live   |
//! | GET    | /sessions/{id}/prompts        | open operator questions           |
//! | POST   | /sessions/{id}/prompts/{pid}  | answer `{"value": ...}`           |
//! | POST   | /sessions/{id}/stop           | stop                              |
//! | GET    | /sessions/{id}/plan           | branched plan and current node    |

use std::collections::{HashMap, VecDeque};
use std::convert::Infallible;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard, RwLock};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::sse::{Event as SseEvent, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::broadcast;

use super::persist::{load_session, FileSink};
use super::ServiceError;
use crate::executive::{
    ActionRequest, AffectiveState, AnxietyLevel, Channel, Event, EventSink, ExecError, NextAction, ObservationBundle,
    Phase, Reading, Session, SessionConfig, SessionSpec, Source, SystemClock,
};
use crate::planner::{unfold, PlanNodeKind};

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Used for any part a create request leaves out.
    pub default_spec: SessionSpec,
    /// One `<id>.jsonl` log per session; logs found here at startup are
    /// recovered.
    pub log_dir: Option<PathBuf>,
    /// Treat actions that ask nothing of anyone as completed immediately,
    /// standing in for the robot's completion report.
    pub autocomplete: bool,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            default_spec: SessionSpec::clinic(),
            log_dir: None,
            autocomplete: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptKind {
    /// Anxiety before the first action; sets the session's affect.
    InitialAnxiety,
    Anxiety,
    Confirm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum AnswerSchema {
    Options { options: Vec<String> },
    Boolean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptStatus {
    Open,
    Answered,
    Expired,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prompt {
    pub id: String,
    pub turn: u64,
    pub kind: PromptKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fluent: Option<String>,
    pub question: String,
    pub schema: AnswerSchema,
    pub status: PromptStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<Value>,
}

#[derive(Default)]
struct PromptBook {
    next: u64,
    prompts: Vec<Prompt>,
    collected: Vec<Reading>,
    affect: Option<AffectiveState>,
    submitted: Option<ObservationBundle>,
}

impl PromptBook {
    fn open(&mut self, turn: u64, kind: PromptKind, fluent: Option<String>, question: String) {
        self.next += 1;
        let schema = match kind {
            PromptKind::Confirm => AnswerSchema::Boolean,
            _ => AnswerSchema::Options {
                options: AnxietyLevel::ALL.iter().map(|l| l.as_str().to_string()).collect(),
            },
        };
        self.prompts.push(Prompt {
            id: format!("p{}", self.next),
            turn,
            kind,
            fluent,
            question,
            schema,
            status: PromptStatus::Open,
            answer: None,
        });
    }

    fn expire_open(&mut self) {
        for p in &mut self.prompts {
            if p.status == PromptStatus::Open {
                p.status = PromptStatus::Expired;
            }
        }
        self.collected.clear();
        self.affect = None;
    }
}

/// A hosted session: the executive plus its prompts and event fan-out.
pub struct ApiSession {
    pub id: String,
    pub session: Arc<Session>,
    notify: broadcast::Sender<u64>,
    book: Mutex<PromptBook>,
}

impl ApiSession {
    fn book(&self) -> MutexGuard<'_, PromptBook> {
        self.book.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn prompts(&self) -> Vec<Prompt> {
        self.book().prompts.clone()
    }
}

pub struct AppState {
    config: ServerConfig,
    sessions: RwLock<HashMap<String, Arc<ApiSession>>>,
}

fn notify_sink(tx: broadcast::Sender<u64>) -> Box<dyn EventSink> {
    Box::new(move |e: &Event, _: &str| {
        let _ = tx.send(e.seq);
    })
}

impl AppState {
    pub fn new(config: ServerConfig) -> Arc<Self> {
        Arc::new(AppState {
            config,
            sessions: RwLock::new(HashMap::new()),
        })
    }

    pub fn session(&self, id: &str) -> Option<Arc<ApiSession>> {
        self.sessions.read().unwrap_or_else(|e| e.into_inner()).get(id).cloned()
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().unwrap_or_else(|e| e.into_inner()).keys().cloned().collect();
        ids.sort();
        ids
    }

    fn log_path(&self, id: &str) -> Option<PathBuf> {
        self.config.log_dir.as_ref().map(|d| d.join(format!("{id}.jsonl")))
    }

    /// Starts a real-time session with its watchdog and driver threads.
    pub fn create(&self, spec: SessionSpec, autocomplete: bool) -> Result<Arc<ApiSession>, ServiceError> {
        let id = format!("{:012x}", rand::random::<u64>() & 0xffff_ffff_ffff);
        let (tx, _) = broadcast::channel(1024);
        let mut sinks = vec![notify_sink(tx.clone())];
        if let Some(path) = self.log_path(&id) {
            sinks.push(Box::new(FileSink::append(&path).map_err(|e| ServiceError::Io(e.to_string()))?));
        }
        let session = Session::start_with_sinks(spec, Arc::new(SystemClock::new()), sinks)?;
        Ok(self.host(id, session, tx, autocomplete))
    }

    fn host(&self, id: String, session: Arc<Session>, tx: broadcast::Sender<u64>, autocomplete: bool) -> Arc<ApiSession> {
        let api = Arc::new(ApiSession {
            id: id.clone(),
            session,
            notify: tx,
            book: Mutex::new(PromptBook::default()),
        });
        self.sessions
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(id, api.clone());
        if !api.session.phase().is_terminal() {
            api.session.spawn_watchdog();
            let driver = api.clone();
            std::thread::spawn(move || drive(driver, autocomplete));
        }
        api
    }

    /// Re-hosts every session whose log is in the log directory.
    pub fn recover(&self) -> Vec<(String, Result<(), ServiceError>)> {
        let Some(dir) = &self.config.log_dir else { return Vec::new() };
        let Ok(entries) = std::fs::read_dir(dir) else { return Vec::new() };
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        paths.sort();
        let mut out = Vec::new();
        for path in paths {
            let id = path.file_stem().unwrap_or_default().to_string_lossy().to_string();
            let result = load_session(&path, &self.config.default_spec).map(|rec| {
                rec.clock.run_free();
                let (tx, _) = broadcast::channel(1024);
                rec.session.add_sink(notify_sink(tx.clone()));
                self.host(id.clone(), rec.session, tx, self.config.autocomplete);
            });
            if let Err(e) = &result {
                log::error!("cannot recover {}: {e}", path.display());
            }
            out.push((id, result));
        }
        out
    }
}

fn anxiety_question(fluent: &str) -> String {
    format!("How anxious is the child now? Sets {fluent}")
}

/// Per-session loop: requests actions, raises prompts for operator-provided
/// fluents and waits for each turn to close (answer, timeout or stop).
fn drive(api: Arc<ApiSession>, autocomplete: bool) {
    let session = api.session.clone();
    let explicit = session
        .config()
        .timeouts
        .get(&crate::pddl::ActionGroup::ExplicitQuery)
        .map(|t| Duration::from_millis(t.millis()))
        .unwrap_or(Duration::from_secs(30));
    if session.snapshot().events == 1 {
        api.book().open(
            0,
            PromptKind::InitialAnxiety,
            None,
            "How anxious is the child before we start?".into(),
        );
        session.wait_until(explicit, |s| s.events > 1 || s.phase.is_terminal());
        api.book().expire_open();
    }
    loop {
        let request: ActionRequest = match session.phase() {
            Phase::AwaitingAction => match session.next_action() {
                Ok(NextAction::Request(r)) => r,
                _ => break,
            },
            Phase::AwaitingObservation => match session.pending_request() {
                Some(r) => r,
                None => continue,
            },
            Phase::Reconciling => {
                let bundle = api
                    .book()
                    .submitted
                    .take()
                    .unwrap_or_else(|| ObservationBundle::new(Source::Operator));
                let _ = session.reconcile(bundle);
                continue;
            }
            Phase::Stopped | Phase::Done => break,
        };
        let turn = session.turn();
        let anxiety_predicate = session.config().affect.anxiety_predicate.clone();
        let mut asked = 0;
        {
            let mut book = api.book();
            for q in request.queries.iter().filter(|q| q.channel == Channel::Operator) {
                let is_anxiety = q.fluent.trim_start_matches('(').split([' ', ')']).next() == Some(&anxiety_predicate);
                if is_anxiety {
                    book.open(turn, PromptKind::Anxiety, Some(q.fluent.clone()), anxiety_question(&q.fluent));
                } else {
                    book.open(
                        turn,
                        PromptKind::Confirm,
                        Some(q.fluent.clone()),
                        format!("Confirm {} after {}", q.fluent, request.action),
                    );
                }
                asked += 1;
            }
        }
        if asked == 0 && autocomplete && request.queries.is_empty() {
            let _ = session.apply_outcome(ObservationBundle::new(Source::Simulator));
        }
        loop {
            let snap = session.wait_until(Duration::from_millis(500), |s| {
                s.turn != turn || s.phase.is_terminal() || s.phase == Phase::Reconciling
            });
            if snap.phase == Phase::Reconciling {
                break;
            }
            if snap.turn != turn || snap.phase.is_terminal() {
                break;
            }
        }
        api.book().expire_open();
    }
    api.book().expire_open();
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn not_found(what: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("unknown {what}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

impl From<ExecError> for ApiError {
    fn from(e: ExecError) -> Self {
        let status = match e {
            ExecError::WrongPhase { .. } | ExecError::Stopped => StatusCode::CONFLICT,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.to_string())
    }
}

type Shared = Arc<AppState>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(session_status))
        .route("/sessions/{id}/events", get(event_stream))
        .route("/sessions/{id}/prompts", get(list_prompts))
        .route("/sessions/{id}/prompts/{pid}", post(answer_prompt))
        .route("/sessions/{id}/stop", post(stop_session))
        .route("/sessions/{id}/plan", get(plan_view))
        .with_state(state)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateBody {
    domain: Option<String>,
    problem: Option<String>,
    config: Option<SessionConfig>,
    autocomplete: Option<bool>,
}

async fn create_session(State(state): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let body: CreateBody = if body.iter().all(u8::is_ascii_whitespace) {
        CreateBody::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?
    };
    let defaults = &state.config.default_spec;
    let spec = SessionSpec {
        domain: body.domain.unwrap_or_else(|| defaults.domain.clone()),
        problem: body.problem.unwrap_or_else(|| defaults.problem.clone()),
        config: body.config.unwrap_or_else(|| defaults.config.clone()),
    };
    let autocomplete = body.autocomplete.unwrap_or(state.config.autocomplete);
    let st = state.clone();
    let api = tokio::task::spawn_blocking(move || st.create(spec, autocomplete))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let snap = api.session.snapshot();
    let body = json!({
        "id": api.id,
        "phase": snap.phase,
        "turn": snap.turn,
        "policy_class": api.session.policy().class,
    });
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn list_sessions(State(state): State<Shared>) -> Json<Value> {
    Json(json!({ "sessions": state.session_ids() }))
}

fn lookup(state: &AppState, id: &str) -> Result<Arc<ApiSession>, ApiError> {
    state.session(id).ok_or_else(|| ApiError::not_found("session"))
}

async fn session_status(State(state): State<Shared>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let api = lookup(&state, &id)?;
    let s = &api.session;
    let snap = s.snapshot();
    Ok(Json(json!({
        "id": api.id,
        "phase": snap.phase,
        "turn": snap.turn,
        "events": snap.events,
        "state": s.current_state().to_bitstring(),
        "affect": s.affect(),
        "pending": s.pending_request(),
    })))
}

async fn list_prompts(State(state): State<Shared>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let api = lookup(&state, &id)?;
    let open: Vec<Prompt> = api
        .prompts()
        .into_iter()
        .filter(|p| p.status == PromptStatus::Open)
        .collect();
    Ok(Json(json!({ "prompts": open })))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerBody {
    value: Value,
}

async fn answer_prompt(
    State(state): State<Shared>,
    Path((id, pid)): Path<(String, String)>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let api = lookup(&state, &id)?;
    let answer: AnswerBody =
        serde_json::from_slice(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let session = api.session.clone();
    tokio::task::spawn_blocking(move || answer_blocking(&api, &session, &pid, answer.value))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

fn answer_blocking(api: &ApiSession, session: &Session, pid: &str, value: Value) -> Result<Json<Value>, ApiError> {
    let mut book = api.book();
    let idx = book
        .prompts
        .iter()
        .position(|p| p.id == pid)
        .ok_or_else(|| ApiError::not_found("prompt"))?;
    let prompt = book.prompts[idx].clone();
    if prompt.status != PromptStatus::Open {
        return Err(ApiError::new(StatusCode::CONFLICT, format!("prompt {pid} is {:?}", prompt.status).to_lowercase()));
    }
    let level = || -> Result<AnxietyLevel, ApiError> {
        value
            .as_str()
            .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "expected one of low, medium, high"))?
            .parse()
            .map_err(|e: String| ApiError::new(StatusCode::BAD_REQUEST, e))
    };
    let now = session.clock().now_ms();
    match prompt.kind {
        PromptKind::InitialAnxiety => {
            let anxiety = level()?;
            book.prompts[idx].status = PromptStatus::Answered;
            book.prompts[idx].answer = Some(value.clone());
            drop(book);
            let affect = AffectiveState {
                anxiety,
                ..session.affect()
            };
            session
                .seed_world(ObservationBundle::new(Source::Operator).with_affect(affect))
                .map_err(ApiError::from)?;
            return Ok(Json(json!({ "prompt": pid, "accepted": true })));
        }
        PromptKind::Anxiety => {
            let anxiety = level()?;
            let fluent = prompt.fluent.clone().unwrap_or_default();
            book.collected.push(Reading {
                fluent,
                value: anxiety.is_ok(),
                channel: Channel::Operator,
                t: now,
            });
            book.affect = Some(AffectiveState {
                anxiety,
                ..session.affect()
            });
        }
        PromptKind::Confirm => {
            let v = value
                .as_bool()
                .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "expected true or false"))?;
            book.collected.push(Reading {
                fluent: prompt.fluent.clone().unwrap_or_default(),
                value: v,
                channel: Channel::Operator,
                t: now,
            });
        }
    }
    book.prompts[idx].status = PromptStatus::Answered;
    book.prompts[idx].answer = Some(value);
    let turn_complete = !book
        .prompts
        .iter()
        .any(|p| p.turn == prompt.turn && p.status == PromptStatus::Open);
    if !turn_complete {
        return Ok(Json(json!({ "prompt": pid, "accepted": true, "result": null })));
    }
    let mut bundle = ObservationBundle::new(Source::Operator);
    bundle.readings = std::mem::take(&mut book.collected);
    bundle.affect = book.affect.take();
    book.submitted = Some(bundle.clone());
    // keep the book locked so the driver cannot expire prompts mid-apply
    match session.apply_outcome(bundle) {
        Ok(result) => Ok(Json(json!({ "prompt": pid, "accepted": true, "result": result }))),
        Err(e) => {
            book.prompts[idx].status = PromptStatus::Expired;
            Err(e.into())
        }
    }
}

async fn stop_session(State(state): State<Shared>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let api = lookup(&state, &id)?;
    let ack = api.session.stop();
    Ok(Json(serde_json::to_value(ack).expect("ack serializes")))
}

async fn plan_view(State(state): State<Shared>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let api = lookup(&state, &id)?;
    let s = &api.session;
    let policy = s.policy();
    let plan = unfold(s.task(), &policy, 1_000)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    let current = s.current_state().to_bitstring();
    let node = plan
        .nodes
        .iter()
        .find(|n| n.state == current && n.kind != PlanNodeKind::BackEdge)
        .map(|n| n.id);
    let snap = s.snapshot();
    Ok(Json(json!({
        "class": policy.class,
        "turn": snap.turn,
        "phase": snap.phase,
        "current_state": current,
        "current_node": node,
        "plan": plan,
    })))
}

struct StreamState {
    session: Arc<Session>,
    rx: broadcast::Receiver<u64>,
    cursor: usize,
    buffer: VecDeque<Event>,
    finished: bool,
}

async fn event_stream(
    State(state): State<Shared>,
    Path(id): Path<String>,
) -> Result<Sse<impl Stream<Item = Result<SseEvent, Infallible>>>, ApiError> {
    let api = lookup(&state, &id)?;
    let init = StreamState {
        rx: api.notify.subscribe(),
        session: api.session.clone(),
        cursor: 0,
        buffer: VecDeque::new(),
        finished: false,
    };
    let stream = stream::unfold(init, |mut st| async move {
        if st.finished {
            return None;
        }
        loop {
            if let Some(e) = st.buffer.pop_front() {
                st.finished = e.kind.is_terminal();
                let ev = SseEvent::default()
                    .event(e.kind.name())
                    .id(e.seq.to_string())
                    .data(e.to_line());
                return Some((Ok(ev), st));
            }
            let fresh = st.session.events_since(st.cursor);
            if !fresh.is_empty() {
                st.cursor += fresh.len();
                st.buffer.extend(fresh);
                continue;
            }
            match st.rx.recv().await {
                Ok(_) | Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => return None,
            }
        }
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

/// Serves the API on `listener` until the process ends.
pub async fn serve(listener: tokio::net::TcpListener, state: Shared) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}
