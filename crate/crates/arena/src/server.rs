//! HTTP front of the session service, with a server-sent event stream per session.

use std::collections::VecDeque;
use std::convert::Infallible;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::sse::{Event as SseEvent, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream};
use serde::{Deserialize, Serialize};
use tokio::sync::broadcast::error::RecvError;

use crate::session::{
    CreateRequest, Event, EventKind, ServiceError, Session, SessionManager, SessionSummary,
    SCHEMA_VERSION,
};

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match self {
            ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::NotYourTurn(_)
            | ServiceError::StaleAction(_)
            | ServiceError::Finished => StatusCode::CONFLICT,
            ServiceError::Invalid(_) => StatusCode::BAD_REQUEST,
        };
        let body = ErrorBody {
            schema_version: SCHEMA_VERSION,
            error: self.code().to_string(),
            message: self.to_string(),
        };
        (status, Json(body)).into_response()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub schema_version: u32,
    pub error: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRequest {
    pub seat: usize,
    pub action: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionList {
    pub schema_version: u32,
    pub sessions: Vec<SessionSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub schema_version: u32,
    pub session: String,
    pub events: Vec<Event>,
}

#[derive(Deserialize)]
struct SeatQuery {
    #[serde(default)]
    seat: usize,
}

#[derive(Deserialize)]
struct AfterQuery {
    #[serde(default)]
    after: u64,
}

pub fn router(manager: Arc<SessionManager>) -> Router {
    Router::new()
        .route("/sessions", post(create).get(list))
        .route("/sessions/{id}", get(summary))
        .route("/sessions/{id}/view", get(view))
        .route("/sessions/{id}/actions", post(act))
        .route("/sessions/{id}/events", get(events))
        .route("/sessions/{id}/log", get(log))
        .route("/sessions/{id}/traces/{n}", get(trace))
        .with_state(manager)
}

/// Let agent seats run until a human is needed, off the async workers.
fn kick(manager: &SessionManager, session: Arc<Session>) {
    let timeout = manager.agent_timeout;
    tokio::task::spawn_blocking(move || session.drive(timeout));
}

async fn create(
    State(m): State<Arc<SessionManager>>,
    Json(req): Json<CreateRequest>,
) -> Result<(StatusCode, Json<SessionSummary>), ServiceError> {
    let session = m.create(&req)?;
    let summary = session.summary();
    kick(&m, session);
    Ok((StatusCode::CREATED, Json(summary)))
}

async fn list(State(m): State<Arc<SessionManager>>) -> Json<SessionList> {
    Json(SessionList {
        schema_version: SCHEMA_VERSION,
        sessions: m.list(),
    })
}

async fn summary(
    State(m): State<Arc<SessionManager>>,
    Path(id): Path<String>,
) -> Result<Json<SessionSummary>, ServiceError> {
    Ok(Json(m.get(&id)?.summary()))
}

async fn view(
    State(m): State<Arc<SessionManager>>,
    Path(id): Path<String>,
    Query(q): Query<SeatQuery>,
) -> Result<Response, ServiceError> {
    Ok(Json(m.get(&id)?.view(q.seat)?).into_response())
}

async fn act(
    State(m): State<Arc<SessionManager>>,
    Path(id): Path<String>,
    Json(req): Json<ActionRequest>,
) -> Result<Response, ServiceError> {
    let session = m.get(&id)?;
    let ack = session.submit(req.seat, &req.action)?;
    kick(&m, session);
    Ok(Json(ack).into_response())
}

async fn log(
    State(m): State<Arc<SessionManager>>,
    Path(id): Path<String>,
) -> Result<Json<EventLog>, ServiceError> {
    let session = m.get(&id)?;
    Ok(Json(EventLog {
        schema_version: SCHEMA_VERSION,
        session: session.id.clone(),
        events: session.log(),
    }))
}

async fn trace(
    State(m): State<Arc<SessionManager>>,
    Path((id, n)): Path<(String, usize)>,
) -> Result<Response, ServiceError> {
    let session = m.get(&id)?;
    let t = session
        .trace(n)
        .ok_or_else(|| ServiceError::Invalid(format!("no trace {n}")))?;
    Ok(Json(t).into_response())
}

async fn events(
    State(m): State<Arc<SessionManager>>,
    Path(id): Path<String>,
    Query(q): Query<AfterQuery>,
    headers: HeaderMap,
) -> Result<Sse<impl Stream<Item = Result<SseEvent, Infallible>>>, ServiceError> {
    let session = m.get(&id)?;
    let resume = headers
        .get("last-event-id")
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.parse::<u64>().ok())
        .unwrap_or(0);
    Ok(Sse::new(event_stream(session, q.after.max(resume))).keep_alive(KeepAlive::default()))
}

struct Cursor {
    session: Arc<Session>,
    rx: tokio::sync::broadcast::Receiver<Event>,
    last: u64,
    queue: VecDeque<Event>,
    done: bool,
}

/// Events with `seq > after`, backlog first, then live, with no gaps or repeats.
/// The stream ends after the finishing event.
pub fn event_stream(
    session: Arc<Session>,
    after: u64,
) -> impl Stream<Item = Result<SseEvent, Infallible>> {
    // Subscribe before reading the backlog so nothing falls between the two.
    let rx = session.subscribe();
    let queue = session.events_after(after).into();
    let cursor = Cursor {
        session,
        rx,
        last: after,
        queue,
        done: false,
    };
    stream::unfold(cursor, |mut c| async move {
        loop {
            if c.done {
                return None;
            }
            if let Some(ev) = c.queue.pop_front() {
                if ev.seq <= c.last {
                    continue;
                }
                c.last = ev.seq;
                c.done = matches!(ev.kind, EventKind::Finished { .. });
                return Some((Ok(sse(&ev)), c));
            }
            if c.session.finished_at().is_some_and(|f| c.last >= f) {
                return None;
            }
            match c.rx.recv().await {
                Ok(ev) => c.queue.push_back(ev),
                // Fell behind the channel: fill in from the log.
                Err(RecvError::Lagged(_)) => c.queue.extend(c.session.events_after(c.last)),
                Err(RecvError::Closed) => return None,
            }
        }
    })
}

fn sse(ev: &Event) -> SseEvent {
    SseEvent::default()
        .id(ev.seq.to_string())
        .event(ev.kind.name())
        .data(serde_json::to_string(ev).expect("events serialize"))
}

/// Bind and serve until the process is stopped.
pub async fn serve(addr: &str, manager: Arc<SessionManager>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "serving");
    axum::serve(listener, router(manager)).await
}
