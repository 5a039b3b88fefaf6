//! Per-seat view documents. Everything here is built from what the seat may
//! see: in Hanabi a player's own cards appear only as the sets of colors and
//! ranks they could still be.

use coord_core::game::{GameEnv, GameKind, StateRef};
use coord_core::hanabi::{CardKnowledge, Color, HanabiState};
use coord_core::kitchen::layout::StationKind;
use coord_core::kitchen::state::{Chef, Cooker, Item};
use coord_core::kitchen::KitchenState;
use coord_core::pursuit::{PursuitState, RoomId};
use serde::{Deserialize, Serialize};

use crate::session::{Actor, Event, EventKind, Status, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegalAction {
    /// Pass this back to submit the action; it goes stale once the state moves on.
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub step: u64,
    pub seat: usize,
    pub label: String,
    pub actor: Actor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stack {
    pub color: Color,
    pub height: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CookerView {
    pub row: usize,
    pub col: usize,
    #[serde(flatten)]
    pub cooker: Cooker,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoorView {
    pub a: RoomId,
    pub b: RoomId,
    pub open: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "game", rename_all = "lowercase")]
pub enum Render {
    Hanabi {
        stacks: Vec<Stack>,
        /// What this seat knows about each of its own cards.
        own_hand: Vec<CardKnowledge>,
        partner_hand: Vec<String>,
        partner_knowledge: Vec<CardKnowledge>,
        reveal_tokens: u8,
        lives: u8,
        deck: usize,
        discards: Vec<String>,
        current_player: usize,
    },
    Kitchen {
        grid: Vec<String>,
        chefs: Vec<Chef>,
        cookers: Vec<CookerView>,
        shared: Vec<Option<Item>>,
        counters: Vec<Option<Item>>,
        tick: u32,
        horizon: Option<u32>,
        delivered: u32,
    },
    Pursuit {
        rooms: Vec<RoomId>,
        doors: Vec<DoorView>,
        agents: [RoomId; 2],
        adversary: RoomId,
        gate: Option<RoomId>,
        gate_open: bool,
        fixes_remaining: Vec<u32>,
        downed: [bool; 2],
        escaped: [bool; 2],
        turn: u32,
        turn_limit: u32,
    },
}

/// The engine-derived part of a view: a pure function of the seat's information set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeatView {
    pub seat: usize,
    pub name: String,
    pub observation: String,
    pub render: Render,
    pub waiting_on: Vec<usize>,
    pub score: u32,
    pub steps: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewDoc {
    pub schema_version: u32,
    pub session: String,
    pub game: GameKind,
    pub board: String,
    pub status: Status,
    pub occupant: String,
    pub state_version: u64,
    /// Sequence number of the newest event folded into this view.
    pub cursor: u64,
    pub can_act: bool,
    pub legal: Vec<LegalAction>,
    #[serde(flatten)]
    pub seat: SeatView,
    pub transcript: Vec<TranscriptLine>,
}

pub struct Meta<'a> {
    pub status: Status,
    pub session: &'a str,
    pub board: &'a str,
    pub horizon: Option<u32>,
    pub version: u64,
    pub cursor: u64,
    pub occupant: String,
    pub can_act: bool,
}

pub fn seat_view(env: &dyn GameEnv, seat: usize, horizon: Option<u32>) -> SeatView {
    let render = match env.state() {
        StateRef::Hanabi(s) => hanabi(s, seat),
        StateRef::Kitchen(s) => kitchen(s, horizon),
        StateRef::Pursuit(s) => pursuit(s),
    };
    SeatView {
        seat,
        name: env.player_names()[seat].clone(),
        observation: env.observation(seat),
        render,
        waiting_on: env.pending(),
        score: env.score(),
        steps: env.steps(),
    }
}

fn hanabi(s: &HanabiState, seat: usize) -> Render {
    let partner = s.partner_of(seat);
    Render::Hanabi {
        stacks: Color::ALL
            .iter()
            .map(|&c| Stack {
                color: c,
                height: s.stacks[c.index()],
            })
            .collect(),
        own_hand: s.knowledge[seat].clone(),
        partner_hand: s.hands[partner].iter().map(|c| c.to_string()).collect(),
        partner_knowledge: s.knowledge[partner].clone(),
        reveal_tokens: s.reveal_tokens,
        lives: s.lives,
        deck: s.deck.len(),
        discards: s.discard_pile.iter().map(|c| c.to_string()).collect(),
        current_player: s.current_player,
    }
}

fn kitchen(s: &KitchenState, horizon: Option<u32>) -> Render {
    let cookers = s
        .layout
        .stations(StationKind::Cooker)
        .iter()
        .zip(&s.cookers)
        .map(|(pos, c)| CookerView {
            row: pos.row,
            col: pos.col,
            cooker: *c,
        })
        .collect();
    Render::Kitchen {
        grid: s.layout.to_text().lines().map(str::to_string).collect(),
        chefs: s.chefs.to_vec(),
        cookers,
        shared: s.shared.clone(),
        counters: s.counters.clone(),
        tick: s.tick,
        horizon,
        delivered: s.delivered,
    }
}

fn pursuit(s: &PursuitState) -> Render {
    Render::Pursuit {
        rooms: s.map.rooms.clone(),
        doors: s
            .map
            .doors
            .iter()
            .zip(&s.door_open)
            .map(|(d, &open)| DoorView {
                a: d.a,
                b: d.b,
                open,
            })
            .collect(),
        agents: s.agent_rooms,
        adversary: s.adversary_room,
        gate: s.map.gate,
        gate_open: s.gate_open,
        fixes_remaining: (0..s.map.generators.len())
            .map(|g| s.fixes_remaining(g))
            .collect(),
        downed: s.downed,
        escaped: s.escaped,
        turn: s.turn,
        turn_limit: s.turn_limit,
    }
}

pub fn transcript(log: &[Event]) -> Vec<TranscriptLine> {
    log.iter()
        .filter_map(|e| match &e.kind {
            EventKind::Action {
                step,
                seat,
                label,
                actor,
                ..
            } => Some(TranscriptLine {
                step: *step,
                seat: *seat,
                label: label.clone(),
                actor: *actor,
            }),
            _ => None,
        })
        .collect()
}

pub fn document(meta: Meta<'_>, env: &dyn GameEnv, seat: usize, log: &[Event]) -> ViewDoc {
    let legal = if meta.can_act {
        env.legal_actions(seat)
            .into_iter()
            .enumerate()
            .map(|(i, a)| LegalAction {
                id: format!("{}-{i}", meta.version),
                label: a.label,
            })
            .collect()
    } else {
        Vec::new()
    };
    ViewDoc {
        schema_version: SCHEMA_VERSION,
        session: meta.session.to_string(),
        game: env.kind(),
        board: meta.board.to_string(),
        status: meta.status,
        occupant: meta.occupant,
        state_version: meta.version,
        cursor: meta.cursor,
        can_act: meta.can_act,
        legal,
        seat: seat_view(env, seat, meta.horizon),
        transcript: transcript(log),
    }
}
