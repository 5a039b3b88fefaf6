//! The four games behind [`GameEnv`], and a config that builds them.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{
    action_list, play_episode, ActionId, Agent, EnvError, EpisodeResult, GameEnv, GameKind,
    StateRef,
};
use crate::hanabi::{deal_with, HanabiRules, HanabiState};
use crate::kitchen::{
    bundled_layout, feasible_macros, parse_layout_named, KitchenLayout, KitchenState, LayoutError,
    MacroRunner, DEFAULT_HORIZON,
};
use crate::pursuit::{
    bundled_map, parse_map, MapError, PursuitMode, PursuitMove, PursuitState, RoomGraph,
};
use crate::rng::Seed;
use crate::text::{self, ObsFlags, Templates};

pub const DEFAULT_LAYOUT: &str = "cramped_room";
pub const DEFAULT_CAPTURE_MAP: &str = "capture_3x3";
pub const DEFAULT_ESCAPE_MAP: &str = "escape_3x3";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown layout or map {0:?}")]
    UnknownBoard(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("{0}")]
    Invalid(String),
}

/// Everything needed to build a fresh episode apart from the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub game: GameKind,
    /// Bundled layout/map name or a path to one. Ignored for Hanabi.
    #[serde(default)]
    pub board: Option<String>,
    /// Kitchen ticks or room-graph rounds; engine default when absent.
    #[serde(default)]
    pub horizon: Option<u32>,
    #[serde(default = "default_names")]
    pub player_names: Vec<String>,
    #[serde(default)]
    pub flags: ObsFlags,
    #[serde(default)]
    pub hanabi_rules: HanabiRules,
}

fn default_names() -> Vec<String> {
    crate::hanabi::default_names()
}

impl EnvConfig {
    pub fn new(game: GameKind) -> Self {
        EnvConfig {
            game,
            board: None,
            horizon: None,
            player_names: default_names(),
            flags: ObsFlags::default(),
            hanabi_rules: HanabiRules::default(),
        }
    }

    pub fn with_board(mut self, board: impl Into<String>) -> Self {
        self.board = Some(board.into());
        self
    }

    pub fn with_horizon(mut self, horizon: u32) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn board_name(&self) -> &str {
        match (&self.board, self.game) {
            (Some(b), _) => b,
            (None, GameKind::Kitchen) => DEFAULT_LAYOUT,
            (None, GameKind::Capture) => DEFAULT_CAPTURE_MAP,
            (None, GameKind::Escape) => DEFAULT_ESCAPE_MAP,
            (None, GameKind::Hanabi) => "",
        }
    }

    pub fn layout(&self) -> Result<KitchenLayout, ConfigError> {
        let name = self.board_name();
        if let Some(l) = bundled_layout(name) {
            return Ok(l);
        }
        let text = read_board(name)?;
        let stem = Path::new(name)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(name);
        Ok(parse_layout_named(stem, &text)?)
    }

    pub fn map(&self) -> Result<RoomGraph, ConfigError> {
        let name = self.board_name();
        if let Some(m) = bundled_map(name) {
            return Ok(m);
        }
        Ok(parse_map(&read_board(name)?)?)
    }

    /// Check everything that can be checked without a seed.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.player_names.len() != 2 {
            return Err(ConfigError::Invalid(
                "exactly two player names are required".into(),
            ));
        }
        if self.player_names[0] == self.player_names[1] {
            return Err(ConfigError::Invalid("player names must differ".into()));
        }
        match self.game {
            GameKind::Hanabi => Ok(()),
            GameKind::Kitchen => self.layout().map(|_| ()),
            GameKind::Capture | GameKind::Escape => self.map().map(|_| ()),
        }
    }

    pub fn build(&self, seed: Seed) -> Result<Box<dyn GameEnv>, ConfigError> {
        self.validate()?;
        let names = self.player_names.clone();
        Ok(match self.game {
            GameKind::Hanabi => Box::new(HanabiEnv::new(deal_with(
                seed,
                names,
                self.hanabi_rules.clone(),
            ))),
            GameKind::Kitchen => {
                let state = KitchenState::new(Arc::new(self.layout()?), names);
                let mut env = KitchenEnv::new(state, self.horizon.unwrap_or(DEFAULT_HORIZON));
                env.flags = self.flags;
                Box::new(env)
            }
            GameKind::Capture | GameKind::Escape => {
                let mode = if self.game == GameKind::Capture {
                    PursuitMode::Capture
                } else {
                    PursuitMode::Escape
                };
                let mut state = PursuitState::new(Arc::new(self.map()?), mode, names);
                if let Some(h) = self.horizon {
                    state.turn_limit = h;
                }
                let mut env = PursuitEnv::new(state);
                env.flags = self.flags;
                Box::new(env)
            }
        })
    }
}

fn read_board(name: &str) -> Result<String, ConfigError> {
    let path = Path::new(name);
    if !path.exists() {
        return Err(ConfigError::UnknownBoard(name.to_string()));
    }
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: name.to_string(),
        source,
    })
}

/// Build the configured game for `seed` and play it out.
pub fn run_episode(
    config: &EnvConfig,
    agents: &mut [Box<dyn Agent>],
    max_turns: usize,
    seed: Seed,
) -> Result<EpisodeResult, ConfigError> {
    let mut env = config.build(seed)?;
    Ok(play_episode(env.as_mut(), agents, max_turns, seed))
}

fn expect_single(decisions: &[(usize, usize)], pending: &[usize]) -> Result<(), EnvError> {
    for &(p, _) in decisions {
        if !pending.contains(&p) {
            return Err(EnvError::NotYourTurn(p));
        }
    }
    for &p in pending {
        if !decisions.iter().any(|d| d.0 == p) {
            return Err(EnvError::MissingDecision(p));
        }
    }
    Ok(())
}

pub struct HanabiEnv {
    pub state: HanabiState,
    pub templates: Arc<Templates>,
}

impl HanabiEnv {
    pub fn new(state: HanabiState) -> Self {
        HanabiEnv {
            state,
            templates: Arc::new(Templates::bundled().clone()),
        }
    }
}

impl GameEnv for HanabiEnv {
    fn kind(&self) -> GameKind {
        GameKind::Hanabi
    }

    fn player_names(&self) -> &[String] {
        &self.state.player_names
    }

    fn pending(&self) -> Vec<usize> {
        if self.state.is_terminal() {
            Vec::new()
        } else {
            vec![self.state.current_player]
        }
    }

    fn legal_actions(&self, player: usize) -> Vec<ActionId> {
        if player != self.state.current_player {
            return Vec::new();
        }
        self.state.legal_actions().unwrap_or_default()
    }

    fn observation(&self, player: usize) -> String {
        text::describe_hanabi(&self.state, player)
    }

    fn description(&self, player: usize) -> String {
        let names = &self.state.player_names;
        text::hanabi_description(
            &self.templates,
            &names[player],
            &names[self.state.partner_of(player)],
        )
    }

    fn state(&self) -> StateRef<'_> {
        StateRef::Hanabi(&self.state)
    }

    fn step(&mut self, decisions: &[(usize, usize)]) -> Result<(), EnvError> {
        if self.state.is_terminal() {
            return Err(EnvError::Terminal);
        }
        expect_single(decisions, &self.pending())?;
        let (_, index) = decisions[0];
        let mv = *self
            .state
            .legal_moves()
            .get(index)
            .ok_or_else(|| EnvError::IllegalAction(format!("index {index}")))?;
        self.state.apply_move(mv);
        Ok(())
    }

    fn is_terminal(&self) -> bool {
        self.state.is_terminal()
    }

    fn score(&self) -> u32 {
        self.state.score()
    }

    fn steps(&self) -> u32 {
        self.state.turn
    }
}

/// Kitchen driven by macro choices; chefs mid-macro keep ticking on their own.
pub struct KitchenEnv {
    pub runner: MacroRunner,
    pub flags: ObsFlags,
    pub templates: Arc<Templates>,
}

impl KitchenEnv {
    pub fn new(state: KitchenState, horizon: u32) -> Self {
        KitchenEnv {
            runner: MacroRunner::new(state, horizon),
            flags: ObsFlags::default(),
            templates: Arc::new(Templates::bundled().clone()),
        }
    }
}

impl GameEnv for KitchenEnv {
    fn kind(&self) -> GameKind {
        GameKind::Kitchen
    }

    fn player_names(&self) -> &[String] {
        &self.runner.state.player_names
    }

    fn pending(&self) -> Vec<usize> {
        self.runner.pending()
    }

    fn legal_actions(&self, player: usize) -> Vec<ActionId> {
        if !self.runner.pending().contains(&player) {
            return Vec::new();
        }
        action_list(
            GameKind::Kitchen,
            feasible_macros(&self.runner.state, player)
                .iter()
                .map(|m| m.label()),
        )
    }

    fn observation(&self, player: usize) -> String {
        text::describe_kitchen(&self.runner.state, player, self.flags)
    }

    fn description(&self, player: usize) -> String {
        let s = &self.runner.state;
        text::kitchen_description(&self.templates, &s.layout, &s.player_names, player)
    }

    fn state(&self) -> StateRef<'_> {
        StateRef::Kitchen(&self.runner.state)
    }

    fn step(&mut self, decisions: &[(usize, usize)]) -> Result<(), EnvError> {
        if self.runner.is_terminal() {
            return Err(EnvError::Terminal);
        }
        expect_single(decisions, &self.runner.pending())?;
        let mut chosen = Vec::with_capacity(decisions.len());
        for &(p, index) in decisions {
            let options = feasible_macros(&self.runner.state, p);
            let action = *options
                .get(index)
                .ok_or_else(|| EnvError::IllegalAction(format!("index {index}")))?;
            chosen.push((p, action));
        }
        for (p, action) in chosen {
            self.runner.assign(p, action);
        }
        self.runner.advance();
        Ok(())
    }

    fn is_terminal(&self) -> bool {
        self.runner.is_terminal()
    }

    fn score(&self) -> u32 {
        self.runner.state.score
    }

    fn steps(&self) -> u32 {
        self.runner.state.tick
    }
}

/// Capture or escape: both active agents choose every round.
pub struct PursuitEnv {
    pub state: PursuitState,
    pub flags: ObsFlags,
    pub templates: Arc<Templates>,
}

impl PursuitEnv {
    pub fn new(state: PursuitState) -> Self {
        PursuitEnv {
            state,
            flags: ObsFlags::default(),
            templates: Arc::new(Templates::bundled().clone()),
        }
    }
}

impl GameEnv for PursuitEnv {
    fn kind(&self) -> GameKind {
        match self.state.mode {
            PursuitMode::Capture => GameKind::Capture,
            PursuitMode::Escape => GameKind::Escape,
        }
    }

    fn player_names(&self) -> &[String] {
        &self.state.player_names
    }

    fn pending(&self) -> Vec<usize> {
        if self.state.is_terminal() {
            return Vec::new();
        }
        (0..2).filter(|&p| self.state.active(p)).collect()
    }

    fn legal_actions(&self, player: usize) -> Vec<ActionId> {
        action_list(
            self.kind(),
            self.state
                .legal_moves(player)
                .iter()
                .map(PursuitMove::to_string),
        )
    }

    fn observation(&self, player: usize) -> String {
        text::describe_pursuit(&self.state, player, self.flags)
    }

    fn description(&self, player: usize) -> String {
        text::pursuit_description(&self.templates, &self.state, player)
    }

    fn state(&self) -> StateRef<'_> {
        StateRef::Pursuit(&self.state)
    }

    fn step(&mut self, decisions: &[(usize, usize)]) -> Result<(), EnvError> {
        if self.state.is_terminal() {
            return Err(EnvError::Terminal);
        }
        expect_single(decisions, &self.pending())?;
        let mut moves = [None, None];
        for &(p, index) in decisions {
            let legal = self.state.legal_moves(p);
            moves[p] = Some(
                *legal
                    .get(index)
                    .ok_or_else(|| EnvError::IllegalAction(format!("index {index}")))?,
            );
        }
        self.state
            .step(moves)
            .map_err(|e| EnvError::IllegalAction(e.to_string()))
    }

    fn is_terminal(&self) -> bool {
        self.state.is_terminal()
    }

    fn score(&self) -> u32 {
        self.state.score()
    }

    fn steps(&self) -> u32 {
        self.state.turn
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_board_is_rejected() {
        let cfg = EnvConfig::new(GameKind::Kitchen).with_board("no_such_kitchen");
        assert!(matches!(
            cfg.build(Seed(1)),
            Err(ConfigError::UnknownBoard(_))
        ));
    }

    #[test]
    fn defaults_build_every_game() {
        for g in GameKind::ALL {
            let env = EnvConfig::new(g).build(Seed(5)).unwrap();
            assert_eq!(env.kind(), g);
            assert!(!env.is_terminal());
            assert!(!env.pending().is_empty());
            for p in env.pending() {
                assert!(!env.legal_actions(p).is_empty());
            }
        }
    }

    #[test]
    fn wrong_seat_is_refused() {
        let mut env = EnvConfig::new(GameKind::Hanabi).build(Seed(5)).unwrap();
        assert_eq!(env.step(&[(1, 0)]), Err(EnvError::NotYourTurn(1)));
        assert_eq!(env.step(&[]), Err(EnvError::MissingDecision(0)));
    }
}
