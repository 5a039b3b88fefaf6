//! The episode contract every engine implements, and the loop that drives it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{AgentError, DecisionTrace};
use crate::hanabi::HanabiState;
use crate::kitchen::KitchenState;
use crate::pursuit::PursuitState;
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKind {
    Hanabi,
    Kitchen,
    Capture,
    Escape,
}

impl GameKind {
    pub const ALL: [GameKind; 4] = [
        GameKind::Hanabi,
        GameKind::Kitchen,
        GameKind::Capture,
        GameKind::Escape,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GameKind::Hanabi => "hanabi",
            GameKind::Kitchen => "kitchen",
            GameKind::Capture => "capture",
            GameKind::Escape => "escape",
        }
    }

    /// Whether the legal list is shown to agents as lettered options.
    pub fn lettered(self) -> bool {
        !matches!(self, GameKind::Kitchen)
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hanabi" => Ok(GameKind::Hanabi),
            "kitchen" | "overcooked" => Ok(GameKind::Kitchen),
            "capture" | "collab-capture" => Ok(GameKind::Capture),
            "escape" | "collab-escape" => Ok(GameKind::Escape),
            other => Err(format!("unknown game {other:?}")),
        }
    }
}

/// One entry of a legal-action list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionId {
    pub game: GameKind,
    pub index: usize,
    pub label: String,
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

pub fn action_list<I, S>(game: GameKind, labels: I) -> Vec<ActionId>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    labels
        .into_iter()
        .enumerate()
        .map(|(index, label)| ActionId {
            game,
            index,
            label: label.into(),
        })
        .collect()
}

/// Spreadsheet-style option letters: A..Z, then AA, AB, ...
pub fn option_letter(index: usize) -> String {
    let mut n = index + 1;
    let mut out = Vec::new();
    while n > 0 {
        let rem = (n - 1) % 26;
        out.push(b'A' + rem as u8);
        n = (n - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

pub fn letter_index(letter: &str) -> Option<usize> {
    if letter.is_empty() || !letter.bytes().all(|b| b.is_ascii_uppercase()) {
        return None;
    }
    let n = letter
        .bytes()
        .fold(0usize, |n, b| n * 26 + (b - b'A' + 1) as usize);
    Some(n - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub player: usize,
    pub action: ActionId,
    pub observation: String,
    /// Set when the agent could not produce a usable decision and a fallback rule chose.
    #[serde(default)]
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub seed: Seed,
    pub score: u32,
    /// Number of decisions taken; equals the transcript length.
    pub turns: usize,
    /// Engine clock at the end: Hanabi turns, kitchen ticks, room-graph rounds.
    pub steps: u32,
    pub transcript: Vec<TranscriptRecord>,
    /// Seconds spent per decision, as reported by the deciding agent.
    pub latencies: Vec<f64>,
    pub traces: Vec<DecisionTrace>,
    /// Why the episode stopped early, if it did.
    pub aborted: Option<String>,
    pub terminal: bool,
}

/// Borrowed engine state for policies that look past the text.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Hanabi(&'a HanabiState),
    Kitchen(&'a KitchenState),
    Pursuit(&'a PursuitState),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnvError {
    #[error("player {0} is not expected to act now")]
    NotYourTurn(usize),
    #[error("illegal action {0}")]
    IllegalAction(String),
    #[error("missing decision for player {0}")]
    MissingDecision(usize),
    #[error("the episode is over")]
    Terminal,
}

/// A two-player coordination game behind a uniform text interface.
pub trait GameEnv: Send {
    fn kind(&self) -> GameKind;

    fn player_names(&self) -> &[String];

    fn player_count(&self) -> usize {
        self.player_names().len()
    }

    /// Players who must choose before the engine can advance. Empty means the
    /// engine advances on its own (a kitchen tick with both chefs mid-macro).
    fn pending(&self) -> Vec<usize>;

    fn legal_actions(&self, player: usize) -> Vec<ActionId>;

    /// Everything the player is shown, ending with the available actions.
    fn observation(&self, player: usize) -> String;

    /// Rules, conventions and answer format, from the player's point of view.
    fn description(&self, player: usize) -> String;

    fn state(&self) -> StateRef<'_>;

    /// Apply one `(player, legal index)` per pending player and advance.
    fn step(&mut self, decisions: &[(usize, usize)]) -> Result<(), EnvError>;

    fn is_terminal(&self) -> bool;

    fn score(&self) -> u32;

    fn steps(&self) -> u32;
}

/// What an agent sees when asked to choose.
#[derive(Debug, Clone, Copy)]
pub struct DecisionView<'a> {
    pub game: GameKind,
    pub player: usize,
    pub player_names: &'a [String],
    pub description: &'a str,
    pub observation: &'a str,
    pub legal: &'a [ActionId],
    /// The partner's most recent action since this player last chose.
    pub partner_last: Option<&'a ActionId>,
    pub state: StateRef<'a>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub index: usize,
    /// Seconds the decision took, as far as the agent can tell. Scripted agents report zero.
    pub latency: f64,
    pub fallback: bool,
    pub trace: Option<DecisionTrace>,
}

impl Decision {
    pub fn pick(index: usize) -> Self {
        Decision {
            index,
            latency: 0.0,
            fallback: false,
            trace: None,
        }
    }
}

pub trait Agent: Send {
    fn name(&self) -> String;

    fn decide(&mut self, view: &DecisionView<'_>) -> Result<Decision, AgentError>;

    /// Forget per-episode memory.
    fn reset(&mut self) {}
}

/// Drive `env` to a terminal state or until `max_turns` decisions have been taken.
pub fn play_episode(
    env: &mut dyn GameEnv,
    agents: &mut [Box<dyn Agent>],
    max_turns: usize,
    seed: Seed,
) -> EpisodeResult {
    assert_eq!(agents.len(), env.player_count(), "one agent per seat");
    for agent in agents.iter_mut() {
        agent.reset();
    }
    let players = env.player_count();
    let mut last_action: Vec<Option<ActionId>> = vec![None; players];
    // Whether player p has already seen the latest action of each other seat.
    let mut seen: Vec<Vec<bool>> = vec![vec![true; players]; players];
    let mut result = EpisodeResult {
        seed,
        score: env.score(),
        turns: 0,
        steps: env.steps(),
        transcript: Vec::new(),
        latencies: Vec::new(),
        traces: Vec::new(),
        aborted: None,
        terminal: false,
    };

    'outer: while !env.is_terminal() {
        let pending = env.pending();
        let mut decisions = Vec::with_capacity(pending.len());
        let mut chosen = Vec::with_capacity(pending.len());
        for &p in &pending {
            if result.transcript.len() + chosen.len() >= max_turns {
                break 'outer;
            }
            let legal = env.legal_actions(p);
            let observation = env.observation(p);
            let description = env.description(p);
            let partner = (p + 1) % players;
            let partner_last = if seen[p][partner] {
                None
            } else {
                last_action[partner].as_ref()
            };
            let view = DecisionView {
                game: env.kind(),
                player: p,
                player_names: env.player_names(),
                description: &description,
                observation: &observation,
                legal: &legal,
                partner_last,
                state: env.state(),
            };
            let decision = match agents[p].decide(&view) {
                Ok(d) => d,
                Err(e) => {
                    tracing::warn!(player = p, error = %e, "agent failed, aborting episode");
                    result.aborted = Some(format!("player {p}: {e}"));
                    break 'outer;
                }
            };
            let action = legal
                .get(decision.index)
                .cloned()
                .expect("agents choose from the legal list");
            seen[p][partner] = true;
            decisions.push((p, decision.index));
            result.latencies.push(decision.latency);
            if let Some(trace) = decision.trace {
                result.traces.push(trace);
            }
            chosen.push(TranscriptRecord {
                player: p,
                action,
                observation,
                fallback: decision.fallback,
            });
        }
        env.step(&decisions)
            .expect("decisions come from the legal lists");
        for rec in chosen {
            for (q, row) in seen.iter_mut().enumerate() {
                if q != rec.player {
                    row[rec.player] = false;
                }
            }
            last_action[rec.player] = Some(rec.action.clone());
            result.transcript.push(rec);
        }
    }

    result.turns = result.transcript.len();
    result.score = env.score();
    result.steps = env.steps();
    result.terminal = env.is_terminal();
    result
}
