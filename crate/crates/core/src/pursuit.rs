//! Room-graph pursuit games.
//!
//! In capture mode two agents corner a thief that flees every round. In escape
//! mode they fix generators to open an exit gate while a killer hunts them.
//!
//! Map files are line oriented, `key: value`, with `#` comments:
//!
//! ```text
//! name: capture_3x3
//! rooms: 1 2 3 4 5 6 7 8 9
//! door: 1 2 closed        # doors are open unless marked closed
//! door: 2 3
//! button: 5 1-2 3-4       # pressing in room 5 toggles these doors
//! generator: 1 3          # room and fixes required (default 3)
//! gate: 9
//! agents: 6 1
//! adversary: 2
//! turn_limit: 40          # optional; defaults to 40 capture, 50 escape
//! ```

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_FIXES: u32 = 3;
pub const CAPTURE_TURN_LIMIT: u32 = 40;
pub const ESCAPE_TURN_LIMIT: u32 = 50;

pub type RoomId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PursuitMode {
    Capture,
    Escape,
}

impl PursuitMode {
    pub fn adversary_name(self) -> &'static str {
        match self {
            PursuitMode::Capture => "Thief",
            PursuitMode::Escape => "Killer",
        }
    }

    pub fn default_turn_limit(self) -> u32 {
        match self {
            PursuitMode::Capture => CAPTURE_TURN_LIMIT,
            PursuitMode::Escape => ESCAPE_TURN_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Door {
    pub a: RoomId,
    pub b: RoomId,
    pub open: bool,
}

impl Door {
    pub fn joins(&self, room: RoomId) -> Option<RoomId> {
        if self.a == room {
            Some(self.b)
        } else if self.b == room {
            Some(self.a)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub room: RoomId,
    pub fixes_required: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "MapRepr", try_from = "MapRepr")]
pub struct RoomGraph {
    pub name: String,
    pub rooms: Vec<RoomId>,
    /// Doors with their initial state, `a < b`, in file order.
    pub doors: Vec<Door>,
    /// Room -> indices of the doors its button toggles.
    pub buttons: BTreeMap<RoomId, Vec<usize>>,
    pub generators: Vec<Generator>,
    pub gate: Option<RoomId>,
    pub agent_start: [RoomId; 2],
    pub adversary_start: RoomId,
    pub turn_limit: Option<u32>,
    source: String,
}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    name: String,
    text: String,
}

impl From<RoomGraph> for MapRepr {
    fn from(g: RoomGraph) -> Self {
        MapRepr {
            name: g.name,
            text: g.source,
        }
    }
}

impl TryFrom<MapRepr> for RoomGraph {
    type Error = MapError;

    fn try_from(r: MapRepr) -> Result<Self, Self::Error> {
        let mut g = parse_map(&r.text)?;
        g.name = r.name;
        Ok(g)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown room {0}")]
    UnknownRoom(RoomId),
    #[error("button references missing door {0}-{1}")]
    UnknownDoor(RoomId, RoomId),
    #[error("missing {0}")]
    Missing(&'static str),
}

fn room_list(value: &str, line: usize) -> Result<Vec<RoomId>, MapError> {
    value
        .split_whitespace()
        .map(|w| {
            w.parse().map_err(|_| MapError::Syntax {
                line,
                message: format!("bad room id {w:?}"),
            })
        })
        .collect()
}

pub fn parse_map(text: &str) -> Result<RoomGraph, MapError> {
    let mut name = String::from("custom");
    let mut rooms = Vec::new();
    let mut doors: Vec<Door> = Vec::new();
    let mut pending_buttons: Vec<(usize, RoomId, Vec<(RoomId, RoomId)>)> = Vec::new();
    let mut generators = Vec::new();
    let mut gate = None;
    let mut agents = None;
    let mut adversary = None;
    let mut turn_limit = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| MapError::Syntax { line, message };
        let (key, value) = content
            .split_once(':')
            .ok_or_else(|| syntax(format!("expected `key: value`, got {content:?}")))?;
        let value = value.trim();
        match key.trim() {
            "name" => name = value.to_string(),
            "rooms" => rooms = room_list(value, line)?,
            "door" => {
                let mut words = value.split_whitespace();
                let ids = room_list(&words.by_ref().take(2).collect::<Vec<_>>().join(" "), line)?;
                if ids.len() != 2 || ids[0] == ids[1] {
                    return Err(syntax("a door joins two distinct rooms".into()));
                }
                let open = match words.next() {
                    None | Some("open") => true,
                    Some("closed") => false,
                    Some(other) => return Err(syntax(format!("door state {other:?}"))),
                };
                let (a, b) = (ids[0].min(ids[1]), ids[0].max(ids[1]));
                if doors.iter().any(|d| d.a == a && d.b == b) {
                    return Err(syntax(format!("duplicate door {a}-{b}")));
                }
                doors.push(Door { a, b, open });
            }
            "button" => {
                let mut words = value.split_whitespace();
                let room = room_list(words.next().unwrap_or(""), line)?
                    .first()
                    .copied()
                    .ok_or_else(|| syntax("button needs a room".into()))?;
                let mut toggles = Vec::new();
                for w in words {
                    let (a, b) = w.split_once('-').ok_or_else(|| {
                        syntax(format!("door reference {w:?} should look like 1-2"))
                    })?;
                    let ids = room_list(&format!("{a} {b}"), line)?;
                    toggles.push((ids[0].min(ids[1]), ids[0].max(ids[1])));
                }
                pending_buttons.push((line, room, toggles));
            }
            "generator" => {
                let ids = room_list(value, line)?;
                match ids.as_slice() {
                    [room] => generators.push(Generator {
                        room: *room,
                        fixes_required: DEFAULT_FIXES,
                    }),
                    [room, fixes] if *fixes > 0 => generators.push(Generator {
                        room: *room,
                        fixes_required: *fixes,
                    }),
                    _ => return Err(syntax("generator: <room> [fixes > 0]".into())),
                }
            }
            "gate" => gate = room_list(value, line)?.first().copied(),
            "agents" => match room_list(value, line)?.as_slice() {
                [a, b] => agents = Some([*a, *b]),
                _ => return Err(syntax("agents: <room> <room>".into())),
            },
            "adversary" => adversary = room_list(value, line)?.first().copied(),
            "turn_limit" => {
                turn_limit = Some(
                    value
                        .parse()
                        .map_err(|_| syntax(format!("bad turn limit {value:?}")))?,
                )
            }
            other => return Err(syntax(format!("unknown key {other:?}"))),
        }
    }

    if rooms.is_empty() {
        return Err(MapError::Missing("rooms"));
    }
    rooms.sort_unstable();
    rooms.dedup();
    let known = |r: RoomId| {
        if rooms.binary_search(&r).is_ok() {
            Ok(r)
        } else {
            Err(MapError::UnknownRoom(r))
        }
    };
    for d in &doors {
        known(d.a)?;
        known(d.b)?;
    }
    let mut buttons: BTreeMap<RoomId, Vec<usize>> = BTreeMap::new();
    for (_, room, toggles) in pending_buttons {
        known(room)?;
        for (a, b) in toggles {
            let idx = doors
                .iter()
                .position(|d| d.a == a && d.b == b)
                .ok_or(MapError::UnknownDoor(a, b))?;
            buttons.entry(room).or_default().push(idx);
        }
    }
    for g in &generators {
        known(g.room)?;
    }
    if let Some(g) = gate {
        known(g)?;
    }
    let agent_start = agents.ok_or(MapError::Missing("agents"))?;
    known(agent_start[0])?;
    known(agent_start[1])?;
    let adversary_start = known(adversary.ok_or(MapError::Missing("adversary"))?)?;

    Ok(RoomGraph {
        name,
        rooms,
        doors,
        buttons,
        generators,
        gate,
        agent_start,
        adversary_start,
        turn_limit,
        source: text.to_string(),
    })
}

/// Maps shipped with the crate.
pub const BUNDLED_MAPS: &[(&str, &str)] = &[
    ("capture_3x3", include_str!("../data/maps/capture_3x3.map")),
    ("escape_3x3", include_str!("../data/maps/escape_3x3.map")),
];

pub fn bundled_map(name: &str) -> Option<RoomGraph> {
    BUNDLED_MAPS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_map(text).expect("bundled maps parse"))
}

impl RoomGraph {
    /// Neighbors through doors that are open in `door_open`, ascending.
    pub fn open_neighbors(&self, room: RoomId, door_open: &[bool]) -> Vec<RoomId> {
        let mut out: Vec<RoomId> = self
            .doors
            .iter()
            .zip(door_open)
            .filter(|(_, &open)| open)
            .filter_map(|(d, _)| d.joins(room))
            .collect();
        out.sort_unstable();
        out
    }

    /// Multi-source BFS room distances through open doors.
    pub fn distances(&self, sources: &[RoomId], door_open: &[bool]) -> BTreeMap<RoomId, u32> {
        let mut dist = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist.insert(s, 0).is_none() {
                queue.push_back(s);
            }
        }
        while let Some(r) = queue.pop_front() {
            let d = dist[&r];
            for n in self.open_neighbors(r, door_open) {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(n) {
                    e.insert(d + 1);
                    queue.push_back(n);
                }
            }
        }
        dist
    }

    pub fn initial_doors(&self) -> Vec<bool> {
        self.doors.iter().map(|d| d.open).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PursuitMove {
    MoveTo(RoomId),
    Press,
    Fix,
    Exit,
    Stay,
}

impl fmt::Display for PursuitMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PursuitMove::MoveTo(r) => write!(f, "Move to Room {r}"),
            PursuitMove::Press => f.write_str("Press the button in current Room"),
            PursuitMove::Fix => f.write_str("Fix the generator in current Room"),
            PursuitMove::Exit => f.write_str("Exit through the gate"),
            PursuitMove::Stay => f.write_str("Stay in current Room"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PursuitError {
    #[error("illegal action for player {player}: {label}")]
    IllegalAction { player: usize, label: String },
    #[error("the game is over")]
    Terminal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PursuitState {
    pub map: Arc<RoomGraph>,
    pub mode: PursuitMode,
    pub player_names: Vec<String>,
    pub agent_rooms: [RoomId; 2],
    pub adversary_room: RoomId,
    pub door_open: Vec<bool>,
    /// Fixes applied so far, aligned with `map.generators`.
    pub fixes_done: Vec<u32>,
    pub gate_open: bool,
    pub downed: [bool; 2],
    pub escaped: [bool; 2],
    pub captured: bool,
    pub turn: u32,
    pub turn_limit: u32,
    pub history: [Vec<String>; 2],
}

impl PursuitState {
    pub fn new(map: Arc<RoomGraph>, mode: PursuitMode, player_names: Vec<String>) -> Self {
        let turn_limit = map.turn_limit.unwrap_or(mode.default_turn_limit());
        PursuitState {
            mode,
            player_names,
            agent_rooms: map.agent_start,
            adversary_room: map.adversary_start,
            door_open: map.initial_doors(),
            fixes_done: vec![0; map.generators.len()],
            gate_open: map.generators.is_empty() && map.gate.is_some(),
            downed: [false; 2],
            escaped: [false; 2],
            captured: false,
            turn: 0,
            turn_limit,
            history: [Vec::new(), Vec::new()],
            map,
        }
    }

    pub fn active(&self, player: usize) -> bool {
        !self.downed[player] && !self.escaped[player]
    }

    pub fn won(&self) -> bool {
        match self.mode {
            PursuitMode::Capture => self.captured,
            PursuitMode::Escape => self.escaped.iter().any(|&e| e),
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.won() || (0..2).all(|p| self.downed[p]) || self.turn >= self.turn_limit
    }

    /// 1 for a win, 0 otherwise.
    pub fn score(&self) -> u32 {
        u32::from(self.won())
    }

    pub fn fixes_remaining(&self, generator: usize) -> u32 {
        self.map.generators[generator]
            .fixes_required
            .saturating_sub(self.fixes_done[generator])
    }

    pub fn legal_moves(&self, player: usize) -> Vec<PursuitMove> {
        if self.is_terminal() || !self.active(player) {
            return Vec::new();
        }
        let room = self.agent_rooms[player];
        let mut moves: Vec<PursuitMove> = self
            .map
            .open_neighbors(room, &self.door_open)
            .into_iter()
            .map(PursuitMove::MoveTo)
            .collect();
        if self.map.buttons.contains_key(&room) {
            moves.push(PursuitMove::Press);
        }
        if self.mode == PursuitMode::Escape {
            let unfixed = self
                .map
                .generators
                .iter()
                .enumerate()
                .any(|(i, g)| g.room == room && self.fixes_remaining(i) > 0);
            if unfixed {
                moves.push(PursuitMove::Fix);
            }
            if self.gate_open && self.map.gate == Some(room) {
                moves.push(PursuitMove::Exit);
            }
        }
        moves.push(PursuitMove::Stay);
        moves
    }

    /// Resolve one round. `moves[p]` must be `Some` legal move for every active player.
    pub fn step(&mut self, moves: [Option<PursuitMove>; 2]) -> Result<(), PursuitError> {
        if self.is_terminal() {
            return Err(PursuitError::Terminal);
        }
        for p in 0..2 {
            if !self.active(p) {
                continue;
            }
            let ok = moves[p].is_some_and(|m| self.legal_moves(p).contains(&m));
            if !ok {
                return Err(PursuitError::IllegalAction {
                    player: p,
                    label: moves[p].map_or_else(|| "nothing".to_string(), |m| m.to_string()),
                });
            }
        }
        let gate_was_open = self.gate_open;
        let acting: Vec<usize> = (0..2).filter(|&p| self.active(p)).collect();
        for p in acting {
            let mv = moves[p].expect("checked above");
            self.history[p].push(mv.to_string());
            match mv {
                PursuitMove::MoveTo(r) => self.agent_rooms[p] = r,
                PursuitMove::Press => {
                    for &d in &self.map.buttons[&self.agent_rooms[p]] {
                        self.door_open[d] = !self.door_open[d];
                    }
                }
                PursuitMove::Fix => {
                    let room = self.agent_rooms[p];
                    if let Some(i) = (0..self.map.generators.len()).find(|&i| {
                        self.map.generators[i].room == room && self.fixes_remaining(i) > 0
                    }) {
                        self.fixes_done[i] += 1;
                    }
                }
                PursuitMove::Exit if gate_was_open => self.escaped[p] = true,
                PursuitMove::Exit | PursuitMove::Stay => {}
            }
        }
        if self.mode == PursuitMode::Escape
            && (0..self.fixes_done.len()).all(|i| self.fixes_remaining(i) == 0)
        {
            self.gate_open = true;
        }

        match self.mode {
            PursuitMode::Capture => {
                if self.cornered() {
                    self.captured = true;
                } else {
                    self.adversary_room = adversary_policy(self);
                }
            }
            PursuitMode::Escape => {
                if !self.won() {
                    self.down_agents_with_killer();
                    self.adversary_room = adversary_policy(self);
                    self.down_agents_with_killer();
                }
            }
        }
        self.turn += 1;
        Ok(())
    }

    /// Thief shares a room with an agent or every open exit leads to one.
    pub fn cornered(&self) -> bool {
        let agents = self.agent_rooms;
        agents.contains(&self.adversary_room)
            || self
                .map
                .open_neighbors(self.adversary_room, &self.door_open)
                .iter()
                .all(|r| agents.contains(r))
    }

    fn down_agents_with_killer(&mut self) {
        for p in 0..2 {
            if self.active(p) && self.agent_rooms[p] == self.adversary_room {
                self.downed[p] = true;
            }
        }
    }
}

/// Where the adversary goes next. Fleeing picks the open neighbor farthest from
/// the nearest agent; hunting steps along a shortest open path toward the
/// nearest active agent. Ties go to the smallest room id.
pub fn adversary_policy(state: &PursuitState) -> RoomId {
    let map = &state.map;
    let here = state.adversary_room;
    let neighbors = map.open_neighbors(here, &state.door_open);
    match state.mode {
        PursuitMode::Capture => {
            let agents: Vec<RoomId> = state.agent_rooms.to_vec();
            let dist = map.distances(&agents, &state.door_open);
            neighbors
                .into_iter()
                .filter(|r| !agents.contains(r))
                .map(|r| (dist.get(&r).copied().unwrap_or(u32::MAX), r))
                // max distance, then smallest id
                .min_by_key(|&(d, r)| (std::cmp::Reverse(d), r))
                .map_or(here, |(_, r)| r)
        }
        PursuitMode::Escape => {
            let targets: Vec<RoomId> = (0..2)
                .filter(|&p| state.active(p))
                .map(|p| state.agent_rooms[p])
                .collect();
            if targets.is_empty() || targets.contains(&here) {
                return here;
            }
            let from_killer = map.distances(&[here], &state.door_open);
            let Some(target) = targets
                .iter()
                .filter_map(|t| from_killer.get(t).map(|d| (*d, *t)))
                .min()
                .map(|(_, t)| t)
            else {
                return here;
            };
            let to_target = map.distances(&[target], &state.door_open);
            let best = to_target[&here] - 1;
            neighbors
                .into_iter()
                .find(|r| to_target.get(r) == Some(&best))
                .unwrap_or(here)
        }
    }
}
