//! Live sessions: one engine per session, human seats fed over HTTP, agent
//! seats driven on blocking threads, and an append-only event log.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{mpsc, Arc, Mutex, RwLock};
use std::time::Duration;

use coord_core::agent::{fallback_index, DecisionTrace, FallbackRule};
use coord_core::backend::scripted::{ScriptedAgent, ScriptedPolicy};
use coord_core::env::EnvConfig;
use coord_core::game::{ActionId, Agent, DecisionView, GameEnv, GameKind, StateRef};
use coord_core::hanabi::HanabiState;
use coord_core::harness::{build_agent, Ablation, AgentSpec};
use coord_core::kitchen::KitchenState;
use coord_core::pursuit::PursuitState;
use coord_core::Seed;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::broadcast;

use crate::view::{self, ViewDoc};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_AGENT_TIMEOUT: Duration = Duration::from_secs(120);

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ServiceError {
    #[error("no session {0}")]
    UnknownSession(String),
    #[error("seat {0} cannot act now")]
    NotYourTurn(usize),
    #[error("action {0} is not in the current legal set")]
    StaleAction(String),
    #[error("the session has finished")]
    Finished,
    #[error("{0}")]
    Invalid(String),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownSession(_) => "UnknownSession",
            ServiceError::NotYourTurn(_) => "NotYourTurn",
            ServiceError::StaleAction(_) => "StaleAction",
            ServiceError::Finished => "Finished",
            ServiceError::Invalid(_) => "Invalid",
        }
    }
}

/// Who sits in a seat: `human`, or any agent spec the harness accepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Occupant {
    Human,
    Agent(AgentSpec),
}

impl fmt::Display for Occupant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Occupant::Human => f.write_str("human"),
            Occupant::Agent(spec) => write!(f, "{spec}"),
        }
    }
}

impl FromStr for Occupant {
    type Err = ServiceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "human" {
            return Ok(Occupant::Human);
        }
        s.parse()
            .map(Occupant::Agent)
            .map_err(|e: coord_core::harness::HarnessError| ServiceError::Invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateRequest {
    pub game: GameKind,
    #[serde(default)]
    pub board: Option<String>,
    pub seats: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub horizon: Option<u32>,
    #[serde(default)]
    pub names: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Blocked on a human seat.
    Waiting,
    /// Agents or the engine clock are moving the game on.
    Live,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub schema_version: u32,
    pub id: String,
    pub game: GameKind,
    pub board: String,
    pub seats: Vec<String>,
    pub names: Vec<String>,
    pub seed: u64,
    pub status: Status,
    pub state_version: u64,
    pub score: u32,
    pub events: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actor {
    Human,
    Agent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventKind {
    SessionStarted {
        game: GameKind,
        board: String,
        seats: Vec<String>,
        names: Vec<String>,
        seed: u64,
    },
    /// A chosen action, announced when the engine applies it.
    Action {
        step: u64,
        seat: usize,
        action_id: String,
        index: usize,
        label: String,
        actor: Actor,
        fallback: bool,
        timed_out: bool,
        /// Index into the session's decision traces.
        trace: Option<usize>,
    },
    Draw {
        seat: usize,
        deck_remaining: usize,
    },
    /// One engine step of the kitchen or room-graph games.
    Tick {
        step: u64,
        clock: u32,
        score: u32,
    },
    TurnChange {
        pending: Vec<usize>,
    },
    Finished {
        score: u32,
        steps: u32,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::SessionStarted { .. } => "session_started",
            EventKind::Action { .. } => "action",
            EventKind::Draw { .. } => "draw",
            EventKind::Tick { .. } => "tick",
            EventKind::TurnChange { .. } => "turn_change",
            EventKind::Finished { .. } => "finished",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// 1-based position in the log.
    pub seq: u64,
    /// Engine steps applied when the event was logged.
    pub state_version: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ack {
    pub schema_version: u32,
    pub accepted: String,
    /// True when the action waits for the partner's simultaneous choice.
    pub staged: bool,
    pub events: Vec<Event>,
}

struct Staged {
    index: usize,
    actor: Actor,
    fallback: bool,
    timed_out: bool,
    trace: Option<usize>,
}

struct Engine {
    env: Box<dyn GameEnv>,
    /// `None` for human seats and while an agent is out deciding.
    agents: Vec<Option<Box<dyn Agent>>>,
    deciding: Vec<bool>,
    staged: BTreeMap<usize, Staged>,
    version: u64,
    last_action: Vec<Option<ActionId>>,
    /// `fresh[p]`: the partner acted since `p` last chose.
    fresh: Vec<bool>,
    traces: Vec<DecisionTrace>,
}

pub struct Session {
    pub id: String,
    game: GameKind,
    board: String,
    seats: Vec<Occupant>,
    seed: u64,
    horizon: Option<u32>,
    engine: Mutex<Engine>,
    log: RwLock<Vec<Event>>,
    tx: broadcast::Sender<Event>,
}

/// A decision handed to an agent outside the engine lock.
struct Job {
    seat: usize,
    version: u64,
    agent: Box<dyn Agent>,
    state: OwnedState,
    names: Vec<String>,
    legal: Vec<ActionId>,
    observation: String,
    description: String,
    partner_last: Option<ActionId>,
}

enum OwnedState {
    Hanabi(HanabiState),
    Kitchen(KitchenState),
    Pursuit(PursuitState),
}

impl OwnedState {
    fn of(s: StateRef<'_>) -> Self {
        match s {
            StateRef::Hanabi(h) => OwnedState::Hanabi(h.clone()),
            StateRef::Kitchen(k) => OwnedState::Kitchen(k.clone()),
            StateRef::Pursuit(p) => OwnedState::Pursuit(p.clone()),
        }
    }

    fn as_ref(&self) -> StateRef<'_> {
        match self {
            OwnedState::Hanabi(h) => StateRef::Hanabi(h),
            OwnedState::Kitchen(k) => StateRef::Kitchen(k),
            OwnedState::Pursuit(p) => StateRef::Pursuit(p),
        }
    }
}

impl Session {
    pub fn game(&self) -> GameKind {
        self.game
    }

    pub fn subscribe(&self) -> broadcast::Receiver<Event> {
        self.tx.subscribe()
    }

    pub fn events_after(&self, after: u64) -> Vec<Event> {
        let log = self.log.read().expect("log lock");
        log.iter().filter(|e| e.seq > after).cloned().collect()
    }

    /// Sequence number of the finishing event, once there is one.
    pub fn finished_at(&self) -> Option<u64> {
        let log = self.log.read().expect("log lock");
        log.last()
            .filter(|e| matches!(e.kind, EventKind::Finished { .. }))
            .map(|e| e.seq)
    }

    pub fn log(&self) -> Vec<Event> {
        self.log.read().expect("log lock").clone()
    }

    pub fn trace(&self, n: usize) -> Option<DecisionTrace> {
        self.engine
            .lock()
            .expect("engine lock")
            .traces
            .get(n)
            .cloned()
    }

    pub fn summary(&self) -> SessionSummary {
        let e = self.engine.lock().expect("engine lock");
        SessionSummary {
            schema_version: SCHEMA_VERSION,
            id: self.id.clone(),
            game: self.game,
            board: self.board.clone(),
            seats: self.seats.iter().map(|s| s.to_string()).collect(),
            names: e.env.player_names().to_vec(),
            seed: self.seed,
            status: self.status_of(&e),
            state_version: e.version,
            score: e.env.score(),
            events: self.log.read().expect("log lock").len() as u64,
        }
    }

    pub fn view(&self, seat: usize) -> Result<ViewDoc, ServiceError> {
        if seat >= self.seats.len() {
            return Err(ServiceError::Invalid(format!("no seat {seat}")));
        }
        let e = self.engine.lock().expect("engine lock");
        let open = e.env.pending().contains(&seat) && !e.staged.contains_key(&seat);
        let log = self.log.read().expect("log lock");
        let cursor = log.last().map_or(0, |ev| ev.seq);
        Ok(view::document(
            view::Meta {
                status: self.status_of(&e),
                session: &self.id,
                board: &self.board,
                horizon: self.horizon,
                version: e.version,
                cursor,
                occupant: self.seats[seat].to_string(),
                can_act: open && self.seats[seat] == Occupant::Human,
            },
            e.env.as_ref(),
            seat,
            &log,
        ))
    }

    fn status_of(&self, e: &Engine) -> Status {
        if e.env.is_terminal() {
            Status::Finished
        } else if e
            .env
            .pending()
            .iter()
            .any(|p| self.seats[*p] == Occupant::Human && !e.staged.contains_key(p))
        {
            Status::Waiting
        } else {
            Status::Live
        }
    }

    fn publish(&self, e: &Engine, kind: EventKind, out: &mut Vec<Event>) {
        let mut log = self.log.write().expect("log lock");
        let event = Event {
            seq: log.len() as u64 + 1,
            state_version: e.version,
            kind,
        };
        log.push(event.clone());
        // Nobody listening is fine.
        let _ = self.tx.send(event.clone());
        out.push(event);
    }

    /// Apply the staged choices once every pending seat has one.
    fn try_step(&self, e: &mut Engine, out: &mut Vec<Event>) -> bool {
        let pending = e.env.pending();
        if e.env.is_terminal() || !pending.iter().all(|p| e.staged.contains_key(p)) {
            return false;
        }
        let step = e.version;
        let deck_before = match e.env.state() {
            StateRef::Hanabi(s) => Some(s.deck.len()),
            _ => None,
        };
        let legal: BTreeMap<usize, Vec<ActionId>> = pending
            .iter()
            .map(|&p| (p, e.env.legal_actions(p)))
            .collect();
        let decisions: Vec<(usize, usize)> =
            pending.iter().map(|&p| (p, e.staged[&p].index)).collect();
        if let Err(err) = e.env.step(&decisions) {
            // Staged indices come from the legal list, so this is a bug.
            tracing::error!(session = %self.id, error = %err, "engine rejected staged decisions");
            e.staged.clear();
            return false;
        }
        e.version += 1;
        let staged = std::mem::take(&mut e.staged);
        for (&p, s) in &staged {
            let action = legal[&p][s.index].clone();
            for (q, f) in e.fresh.iter_mut().enumerate() {
                if q != p {
                    *f = true;
                }
            }
            e.fresh[p] = false;
            e.last_action[p] = Some(action.clone());
            self.publish(
                e,
                EventKind::Action {
                    step,
                    seat: p,
                    action_id: format!("{step}-{}", s.index),
                    index: s.index,
                    label: action.label,
                    actor: s.actor,
                    fallback: s.fallback,
                    timed_out: s.timed_out,
                    trace: s.trace,
                },
                out,
            );
        }
        match e.env.state() {
            StateRef::Hanabi(s) => {
                if deck_before.is_some_and(|d| s.deck.len() < d) {
                    let seat = pending[0];
                    let remaining = s.deck.len();
                    self.publish(
                        e,
                        EventKind::Draw {
                            seat,
                            deck_remaining: remaining,
                        },
                        out,
                    );
                }
            }
            _ => {
                let kind = EventKind::Tick {
                    step,
                    clock: e.env.steps(),
                    score: e.env.score(),
                };
                self.publish(e, kind, out);
            }
        }
        if e.env.is_terminal() {
            let kind = EventKind::Finished {
                score: e.env.score(),
                steps: e.env.steps(),
            };
            self.publish(e, kind, out);
        } else {
            let next = e.env.pending();
            if !next.is_empty() {
                self.publish(e, EventKind::TurnChange { pending: next }, out);
            }
        }
        true
    }

    /// Stage a human seat's choice. `action` is `"{state_version}-{index}"`.
    pub fn submit(&self, seat: usize, action: &str) -> Result<Ack, ServiceError> {
        if seat >= self.seats.len() {
            return Err(ServiceError::Invalid(format!("no seat {seat}")));
        }
        let mut e = self.engine.lock().expect("engine lock");
        if e.env.is_terminal() {
            return Err(ServiceError::Finished);
        }
        if self.seats[seat] != Occupant::Human
            || !e.env.pending().contains(&seat)
            || e.staged.contains_key(&seat)
        {
            return Err(ServiceError::NotYourTurn(seat));
        }
        let stale = || ServiceError::StaleAction(action.to_string());
        let (v, i) = action.split_once('-').ok_or_else(stale)?;
        let (v, index): (u64, usize) = (
            v.parse().map_err(|_| stale())?,
            i.parse().map_err(|_| stale())?,
        );
        if v != e.version || index >= e.env.legal_actions(seat).len() {
            return Err(stale());
        }
        e.staged.insert(
            seat,
            Staged {
                index,
                actor: Actor::Human,
                fallback: false,
                timed_out: false,
                trace: None,
            },
        );
        let mut events = Vec::new();
        let stepped = self.try_step(&mut e, &mut events);
        Ok(Ack {
            schema_version: SCHEMA_VERSION,
            accepted: action.to_string(),
            staged: !stepped,
            events,
        })
    }

    /// Run agent seats and self-advancing steps until a human must act or the game ends.
    pub fn drive(&self, timeout: Duration) {
        loop {
            let jobs = {
                let mut e = self.engine.lock().expect("engine lock");
                if e.env.is_terminal() {
                    return;
                }
                if e.env.pending().is_empty() {
                    let mut sink = Vec::new();
                    if !self.try_step(&mut e, &mut sink) {
                        return;
                    }
                    continue;
                }
                self.take_jobs(&mut e)
            };
            if jobs.is_empty() {
                return;
            }
            let outcomes: Vec<Outcome> =
                jobs.into_iter().map(|j| self.run_job(j, timeout)).collect();
            let mut e = self.engine.lock().expect("engine lock");
            for Outcome {
                seat,
                version,
                agent,
                mut staged,
                trace,
            } in outcomes
            {
                e.deciding[seat] = false;
                e.fresh[seat] = false;
                if let Some(t) = trace {
                    staged.trace = Some(e.traces.len());
                    e.traces.push(t);
                }
                e.agents[seat] = Some(agent);
                if e.version == version {
                    e.staged.insert(seat, staged);
                }
            }
            let mut sink = Vec::new();
            self.try_step(&mut e, &mut sink);
        }
    }

    fn take_jobs(&self, e: &mut Engine) -> Vec<Job> {
        let mut jobs = Vec::new();
        for p in e.env.pending() {
            if e.staged.contains_key(&p) || e.deciding[p] {
                continue;
            }
            let Some(agent) = e.agents[p].take() else {
                continue;
            };
            e.deciding[p] = true;
            let partner = (p + 1) % self.seats.len();
            jobs.push(Job {
                seat: p,
                version: e.version,
                agent,
                state: OwnedState::of(e.env.state()),
                names: e.env.player_names().to_vec(),
                legal: e.env.legal_actions(p),
                observation: e.env.observation(p),
                description: e.env.description(p),
                partner_last: if e.fresh[p] {
                    e.last_action[partner].clone()
                } else {
                    None
                },
            });
        }
        jobs
    }

    fn run_job(&self, job: Job, timeout: Duration) -> Outcome {
        let Job {
            seat,
            version,
            agent,
            state,
            names,
            legal,
            observation,
            description,
            partner_last,
        } = job;
        let game = self.game;
        let (tx, rx) = mpsc::channel();
        let worker_legal = legal.clone();
        let worker_state = match &state {
            OwnedState::Hanabi(h) => OwnedState::Hanabi(h.clone()),
            OwnedState::Kitchen(k) => OwnedState::Kitchen(k.clone()),
            OwnedState::Pursuit(p) => OwnedState::Pursuit(p.clone()),
        };
        std::thread::spawn(move || {
            let mut agent = agent;
            let view = DecisionView {
                game,
                player: seat,
                player_names: &names,
                description: &description,
                observation: &observation,
                legal: &worker_legal,
                partner_last: partner_last.as_ref(),
                state: worker_state.as_ref(),
            };
            let result = agent.decide(&view);
            let _ = tx.send((agent, result));
        });
        let fallback = |timed_out| {
            fallback_staged(
                fallback_index(FallbackRule::Safest, game, &legal, state.as_ref()),
                timed_out,
            )
        };
        let (agent, staged, trace) = match rx.recv_timeout(timeout) {
            Ok((agent, Ok(d))) if d.index < legal.len() => {
                let staged = Staged {
                    index: d.index,
                    actor: Actor::Agent,
                    fallback: d.fallback,
                    timed_out: false,
                    trace: None,
                };
                (agent, staged, d.trace)
            }
            Ok((agent, result)) => {
                let why = result
                    .err()
                    .map_or_else(|| "index out of range".to_string(), |e| e.to_string());
                tracing::warn!(session = %self.id, seat, error = %why, "agent failed, applying fallback");
                (agent, fallback(false), None)
            }
            Err(_) => {
                tracing::warn!(session = %self.id, seat, ?timeout, "agent timed out, applying fallback");
                // The stuck agent keeps its thread; the seat gets a fresh one.
                (self.rebuild_agent(seat), fallback(true), None)
            }
        };
        Outcome {
            seat,
            version,
            agent,
            staged,
            trace,
        }
    }

    fn rebuild_agent(&self, seat: usize) -> Box<dyn Agent> {
        let seed = Seed(self.seed + seat as u64);
        let built = match &self.seats[seat] {
            Occupant::Agent(spec) => build_agent(spec, Ablation::default(), seed).ok(),
            Occupant::Human => None,
        };
        built.unwrap_or_else(|| Box::new(ScriptedAgent::new(ScriptedPolicy::RandomLegal, seed)))
    }
}

struct Outcome {
    seat: usize,
    version: u64,
    agent: Box<dyn Agent>,
    staged: Staged,
    trace: Option<DecisionTrace>,
}

fn fallback_staged(index: usize, timed_out: bool) -> Staged {
    Staged {
        index,
        actor: Actor::Agent,
        fallback: true,
        timed_out,
        trace: None,
    }
}

/// All sessions of one process.
pub struct SessionManager {
    sessions: RwLock<BTreeMap<String, Arc<Session>>>,
    next_id: AtomicU64,
    pub agent_timeout: Duration,
}

impl Default for SessionManager {
    fn default() -> Self {
        SessionManager::new(DEFAULT_AGENT_TIMEOUT)
    }
}

impl SessionManager {
    pub fn new(agent_timeout: Duration) -> Self {
        SessionManager {
            sessions: RwLock::new(BTreeMap::new()),
            next_id: AtomicU64::new(1),
            agent_timeout,
        }
    }

    pub fn create(&self, req: &CreateRequest) -> Result<Arc<Session>, ServiceError> {
        if req.seats.len() != 2 {
            return Err(ServiceError::Invalid(format!(
                "expected 2 seats, got {}",
                req.seats.len()
            )));
        }
        let seats: Vec<Occupant> = req
            .seats
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()?;
        let mut cfg = EnvConfig::new(req.game);
        cfg.board = req.board.clone();
        cfg.horizon = req.horizon;
        if let Some(names) = &req.names {
            cfg.player_names = names.clone();
        }
        let env = cfg
            .build(Seed(req.seed))
            .map_err(|e| ServiceError::Invalid(e.to_string()))?;
        let agents = seats
            .iter()
            .enumerate()
            .map(|(i, s)| match s {
                Occupant::Human => Ok(None),
                Occupant::Agent(spec) => {
                    build_agent(spec, Ablation::default(), Seed(req.seed + i as u64))
                        .map(Some)
                        .map_err(|e| ServiceError::Invalid(e.to_string()))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let id = format!("s{}", self.next_id.fetch_add(1, Ordering::SeqCst));
        let (tx, _) = broadcast::channel(1024);
        let session = Arc::new(Session {
            id: id.clone(),
            game: req.game,
            board: cfg.board_name().to_string(),
            seats: seats.clone(),
            seed: req.seed,
            horizon: match req.game {
                GameKind::Kitchen => {
                    Some(req.horizon.unwrap_or(coord_core::kitchen::DEFAULT_HORIZON))
                }
                _ => req.horizon,
            },
            engine: Mutex::new(Engine {
                env,
                agents,
                deciding: vec![false; 2],
                staged: BTreeMap::new(),
                version: 0,
                last_action: vec![None; 2],
                fresh: vec![false; 2],
                traces: Vec::new(),
            }),
            log: RwLock::new(Vec::new()),
            tx,
        });
        {
            let e = session.engine.lock().expect("engine lock");
            let mut sink = Vec::new();
            let started = EventKind::SessionStarted {
                game: req.game,
                board: session.board.clone(),
                seats: seats.iter().map(|s| s.to_string()).collect(),
                names: e.env.player_names().to_vec(),
                seed: req.seed,
            };
            session.publish(&e, started, &mut sink);
            let pending = e.env.pending();
            session.publish(&e, EventKind::TurnChange { pending }, &mut sink);
        }
        self.sessions
            .write()
            .expect("sessions lock")
            .insert(id, session.clone());
        tracing::info!(session = %session.id, game = %req.game, seats = ?req.seats, "session created");
        Ok(session)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Session>, ServiceError> {
        self.sessions
            .read()
            .expect("sessions lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    pub fn list(&self) -> Vec<SessionSummary> {
        let sessions: Vec<Arc<Session>> = self
            .sessions
            .read()
            .expect("sessions lock")
            .values()
            .cloned()
            .collect();
        sessions.iter().map(|s| s.summary()).collect()
    }
}

/// Rebuild an engine from the session's start event and its action log.
pub fn replay(events: &[Event], horizon: Option<u32>) -> Result<Box<dyn GameEnv>, ServiceError> {
    let Some(EventKind::SessionStarted {
        game,
        board,
        names,
        seed,
        ..
    }) = events.first().map(|e| &e.kind)
    else {
        return Err(ServiceError::Invalid(
            "log does not start with session_started".into(),
        ));
    };
    let mut cfg = EnvConfig::new(*game).with_board(board.clone());
    cfg.horizon = horizon;
    cfg.player_names = names.clone();
    let mut env = cfg
        .build(Seed(*seed))
        .map_err(|e| ServiceError::Invalid(e.to_string()))?;
    let mut by_step: BTreeMap<u64, Vec<(usize, usize)>> = BTreeMap::new();
    let mut steps = 0;
    for ev in events {
        steps = steps.max(ev.state_version);
        if let EventKind::Action {
            step, seat, index, ..
        } = ev.kind
        {
            by_step.entry(step).or_default().push((seat, index));
        }
    }
    for k in 0..steps {
        let decisions = by_step.remove(&k).unwrap_or_default();
        env.step(&decisions)
            .map_err(|e| ServiceError::Invalid(format!("step {k}: {e}")))?;
    }
    Ok(env)
}
