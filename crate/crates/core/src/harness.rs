//! Self-play and cross-play matchups.
//!
//! A matchup seats agent A and agent B, plays a fixed list of seeds, and
//! optionally replays every seed with the seats swapped. Episodes run in
//! parallel under a worker cap; the report is assembled afterwards in seed
//! order, so it does not depend on scheduling.
//!
//! Agent spec strings:
//!
//! | spec                    | agent                                              |
//! |-------------------------|----------------------------------------------------|
//! | `scripted:<policy>`     | a hand-written policy, e.g. `scripted:rule-hanabi` |
//! | `llm:<backend>`         | planner only, no partner modelling or checking     |
//! | `cac:<backend>`         | planner with partner modelling and self-checking   |
//! | `replay:<file>`         | shorthand for `llm:replay:<file>`                  |
//!
//! Backends: `replay:<file>` (replies separated by `---` lines) or
//! `http:<model>@<endpoint>`.

use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{CacAgent, CacConfig, Stage};
use crate::backend::scripted::{ScriptedAgent, ScriptedPolicy};
use crate::backend::{BackendRef, HttpBackend, HttpConfig, ReplayBackend};
use crate::env::{ConfigError, EnvConfig};
use crate::game::{play_episode, Agent, EpisodeResult, GameKind};
use crate::rng::Seed;
use crate::stats::{mean, sample_std, MeanErr};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid agent spec {spec:?}: {reason}")]
    AgentSpec { spec: String, reason: String },
    #[error("invalid matchup: {0}")]
    Invalid(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn io_err(path: &Path, e: impl fmt::Display) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendSpec {
    Replay(PathBuf),
    Http { model: String, endpoint: String },
}

impl BackendSpec {
    pub fn build(&self) -> Result<BackendRef, HarnessError> {
        let spec_err = |reason: String| HarnessError::AgentSpec {
            spec: self.to_string(),
            reason,
        };
        Ok(match self {
            BackendSpec::Replay(path) => {
                Arc::new(ReplayBackend::from_file(path).map_err(|e| spec_err(e.to_string()))?)
            }
            BackendSpec::Http { model, endpoint } => Arc::new(
                HttpBackend::new(HttpConfig::new(endpoint.clone(), model.clone()))
                    .map_err(|e| spec_err(e.to_string()))?,
            ),
        })
    }
}

impl fmt::Display for BackendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendSpec::Replay(p) => write!(f, "replay:{}", p.display()),
            BackendSpec::Http { model, endpoint } => write!(f, "http:{model}@{endpoint}"),
        }
    }
}

impl FromStr for BackendSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some(("replay", path)) if !path.is_empty() => {
                Ok(BackendSpec::Replay(PathBuf::from(path)))
            }
            Some(("http", rest)) => match rest.split_once('@') {
                Some((model, endpoint)) if !model.is_empty() && !endpoint.is_empty() => {
                    Ok(BackendSpec::Http {
                        model: model.to_string(),
                        endpoint: endpoint.to_string(),
                    })
                }
                _ => Err("expected http:<model>@<endpoint>".into()),
            },
            _ => Err("expected replay:<file> or http:<model>@<endpoint>".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgentSpec {
    Scripted(ScriptedPolicy),
    /// `cac` turns on partner modelling and self-checking, subject to the ablation flags.
    Llm {
        backend: BackendSpec,
        cac: bool,
    },
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentSpec::Scripted(p) => write!(f, "scripted:{p}"),
            AgentSpec::Llm { backend, cac: true } => write!(f, "cac:{backend}"),
            AgentSpec::Llm {
                backend,
                cac: false,
            } => write!(f, "llm:{backend}"),
        }
    }
}

impl FromStr for AgentSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: String| HarnessError::AgentSpec {
            spec: s.to_string(),
            reason,
        };
        let (kind, rest) = s.split_once(':').ok_or_else(|| err("missing ':'".into()))?;
        match kind {
            "scripted" => rest.parse().map(AgentSpec::Scripted).map_err(err),
            "llm" | "cac" => Ok(AgentSpec::Llm {
                backend: rest.parse().map_err(err)?,
                cac: kind == "cac",
            }),
            "replay" => Ok(AgentSpec::Llm {
                backend: s.parse().map_err(err)?,
                cac: false,
            }),
            other => Err(err(format!("unknown agent kind {other:?}"))),
        }
    }
}

/// Switches for the pipeline ablations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ablation {
    #[serde(default)]
    pub no_tom: bool,
    #[serde(default)]
    pub no_verify: bool,
}

/// Build a fresh agent. Replay scripts restart from the top each call.
pub fn build_agent(
    spec: &AgentSpec,
    ablation: Ablation,
    seed: Seed,
) -> Result<Box<dyn Agent>, HarnessError> {
    Ok(match spec {
        AgentSpec::Scripted(p) => Box::new(ScriptedAgent::new(*p, seed)),
        AgentSpec::Llm { backend, cac } => {
            let planner = backend.build()?;
            let mut config = CacConfig::new(planner.clone());
            if *cac && !ablation.no_tom {
                config = config.with_tom(planner.clone());
            }
            if *cac && !ablation.no_verify {
                config = config.with_verifier(planner);
            }
            Box::new(CacAgent::new(spec.to_string(), config))
        }
    })
}

fn default_episodes() -> usize {
    3
}

fn default_workers() -> usize {
    4
}

fn default_max_turns() -> usize {
    10_000
}

/// One matchup. Loadable from TOML; see the README for the key list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchupConfig {
    pub game: GameKind,
    /// Layout or map name, or a path to one.
    #[serde(default)]
    pub board: Option<String>,
    pub agent_a: String,
    pub agent_b: String,
    #[serde(default = "default_episodes")]
    pub episodes: usize,
    /// Explicit seeds, one per episode. Otherwise `seed`, `seed + 1`, ...
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub horizon: Option<u32>,
    /// Also play every seed with B in the first seat.
    #[serde(default)]
    pub swap_positions: bool,
    #[serde(default, flatten)]
    pub ablation: Ablation,
    /// Hide the partner's inventory and whereabouts from observations.
    #[serde(default)]
    pub omit_partner_info: bool,
    #[serde(default)]
    pub player_names: Option<Vec<String>>,
    #[serde(default = "default_workers")]
    pub max_workers: usize,
    /// Decision cap per episode, a guard against agents that never finish.
    #[serde(default = "default_max_turns")]
    pub max_turns: usize,
}

impl MatchupConfig {
    pub fn new(game: GameKind, agent_a: impl Into<String>, agent_b: impl Into<String>) -> Self {
        MatchupConfig {
            game,
            board: None,
            agent_a: agent_a.into(),
            agent_b: agent_b.into(),
            episodes: default_episodes(),
            seeds: None,
            seed: 0,
            horizon: None,
            swap_positions: false,
            ablation: Ablation::default(),
            omit_partner_info: false,
            player_names: None,
            max_workers: default_workers(),
            max_turns: default_max_turns(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Invalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::from_toml(&text)
    }

    pub fn seed_list(&self) -> Vec<Seed> {
        match &self.seeds {
            Some(s) => s.iter().map(|&x| Seed(x)).collect(),
            None => (0..self.episodes as u64)
                .map(|i| Seed(self.seed + i))
                .collect(),
        }
    }

    pub fn env_config(&self) -> EnvConfig {
        let mut env = EnvConfig::new(self.game);
        env.board = self.board.clone();
        env.horizon = self.horizon;
        env.flags.include_partner_info = !self.omit_partner_info;
        if let Some(names) = &self.player_names {
            env.player_names = names.clone();
        }
        env
    }

    pub fn agents(&self) -> Result<[AgentSpec; 2], HarnessError> {
        Ok([self.agent_a.parse()?, self.agent_b.parse()?])
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.episodes == 0 {
            return Err(HarnessError::Invalid("episodes must be at least 1".into()));
        }
        if let Some(s) = &self.seeds {
            if s.len() != self.episodes {
                return Err(HarnessError::Invalid(format!(
                    "{} seeds given for {} episodes",
                    s.len(),
                    self.episodes
                )));
            }
        }
        if self.max_workers == 0 {
            return Err(HarnessError::Invalid(
                "max_workers must be at least 1".into(),
            ));
        }
        self.agents()?;
        self.env_config().validate()?;
        Ok(())
    }
}

/// Which agent sits in the first seat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SeatOrder {
    #[serde(rename = "AB")]
    AFirst,
    #[serde(rename = "BA")]
    BFirst,
}

impl SeatOrder {
    pub fn name(self) -> &'static str {
        match self {
            SeatOrder::AFirst => "AB",
            SeatOrder::BFirst => "BA",
        }
    }

    /// Agent (0 = A, 1 = B) in `seat`.
    pub fn agent_in(self, seat: usize) -> usize {
        match self {
            SeatOrder::AFirst => seat,
            SeatOrder::BFirst => 1 - seat,
        }
    }
}

/// Flat per-episode row, also the CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub order: SeatOrder,
    pub episode: usize,
    pub seed: u64,
    pub seat0_agent: String,
    pub seat1_agent: String,
    pub seat0_name: String,
    pub seat1_name: String,
    pub score: u32,
    pub turns: usize,
    pub steps: u32,
    pub decisions_a: usize,
    pub decisions_b: usize,
    pub latency_sum_a: f64,
    pub latency_sum_b: f64,
    pub fallbacks: usize,
    pub tom_calls: usize,
    pub verifier_calls: usize,
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyStat {
    pub decisions: usize,
    pub mean: f64,
    pub std: f64,
}

impl LatencyStat {
    fn of(xs: &[f64]) -> Self {
        LatencyStat {
            decisions: xs.len(),
            mean: mean(xs),
            std: sample_std(xs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderSummary {
    pub order: SeatOrder,
    pub episodes: usize,
    /// Episodes that stopped early; excluded from the score statistics.
    pub aborted: usize,
    pub score: MeanErr,
    pub turns: MeanErr,
    /// Per-decision seconds for agent A, then agent B.
    pub latency: [LatencyStat; 2],
    pub fallbacks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchupReport {
    pub config: MatchupConfig,
    pub summaries: Vec<OrderSummary>,
    pub episodes: Vec<EpisodeRecord>,
}

impl MatchupReport {
    pub fn summary(&self, order: SeatOrder) -> Option<&OrderSummary> {
        self.summaries.iter().find(|s| s.order == order)
    }

    /// Scores as `A-first | B-first`, the layout used for cross-play tables.
    pub fn score_line(&self) -> String {
        self.summaries
            .iter()
            .map(|s| s.score.to_string())
            .collect::<Vec<_>>()
            .join(" | ")
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "{} on {}: A = {}, B = {}\n",
            self.config.game,
            self.config.env_config().board_name(),
            self.config.agent_a,
            self.config.agent_b
        );
        for s in &self.summaries {
            out.push_str(&format!(
                "  {}  score {}  turns {}  latency A {:.3} ± {:.3} s  B {:.3} ± {:.3} s  fallbacks {}  aborted {}/{}\n",
                s.order.name(),
                s.score,
                s.turns,
                s.latency[0].mean,
                s.latency[0].std,
                s.latency[1].mean,
                s.latency[1].std,
                s.fallbacks,
                s.aborted,
                s.episodes,
            ));
        }
        out
    }
}

/// A finished matchup with the raw episodes, which carry transcripts and traces.
pub struct MatchupRun {
    pub report: MatchupReport,
    pub results: Vec<(SeatOrder, EpisodeResult)>,
}

pub fn run_matchup(cfg: &MatchupConfig) -> Result<MatchupRun, HarnessError> {
    cfg.validate()?;
    let specs = cfg.agents()?;
    let env = cfg.env_config();
    let seeds = cfg.seed_list();
    let mut orders = vec![SeatOrder::AFirst];
    if cfg.swap_positions {
        orders.push(SeatOrder::BFirst);
    }
    let jobs: Vec<(SeatOrder, usize, Seed)> = orders
        .iter()
        .flat_map(|&o| seeds.iter().enumerate().map(move |(i, &s)| (o, i, s)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.max_workers)
        .build()
        .map_err(|e| HarnessError::Invalid(e.to_string()))?;
    let outcomes: Vec<Result<EpisodeResult, HarnessError>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(order, _, seed)| {
                let mut agents = Vec::with_capacity(2);
                for seat in 0..2 {
                    agents.push(build_agent(
                        &specs[order.agent_in(seat)],
                        cfg.ablation,
                        seed,
                    )?);
                }
                let mut game = env.build(seed)?;
                Ok(play_episode(
                    game.as_mut(),
                    &mut agents,
                    cfg.max_turns,
                    seed,
                ))
            })
            .collect()
    });

    let mut results = Vec::with_capacity(jobs.len());
    for (&(order, _, _), outcome) in jobs.iter().zip(outcomes) {
        results.push((order, outcome?));
    }
    let records: Vec<EpisodeRecord> = jobs
        .iter()
        .zip(&results)
        .map(|(&(order, episode, seed), (_, r))| episode_record(cfg, &env, order, episode, seed, r))
        .collect();
    let summaries = orders
        .iter()
        .map(|&o| summarize(o, &records, &results))
        .collect();
    tracing::info!(game = %cfg.game, a = %cfg.agent_a, b = %cfg.agent_b, episodes = records.len(), "matchup finished");
    Ok(MatchupRun {
        report: MatchupReport {
            config: cfg.clone(),
            summaries,
            episodes: records,
        },
        results,
    })
}

fn episode_record(
    cfg: &MatchupConfig,
    env: &EnvConfig,
    order: SeatOrder,
    episode: usize,
    seed: Seed,
    r: &EpisodeResult,
) -> EpisodeRecord {
    let specs = [&cfg.agent_a, &cfg.agent_b];
    let mut decisions = [0usize; 2];
    let mut latency = [0.0f64; 2];
    for (t, lat) in r.transcript.iter().zip(&r.latencies) {
        let a = order.agent_in(t.player);
        decisions[a] += 1;
        latency[a] += lat;
    }
    EpisodeRecord {
        order,
        episode,
        seed: seed.0,
        seat0_agent: specs[order.agent_in(0)].clone(),
        seat1_agent: specs[order.agent_in(1)].clone(),
        seat0_name: env.player_names[0].clone(),
        seat1_name: env.player_names[1].clone(),
        score: r.score,
        turns: r.turns,
        steps: r.steps,
        decisions_a: decisions[0],
        decisions_b: decisions[1],
        latency_sum_a: latency[0],
        latency_sum_b: latency[1],
        fallbacks: r.transcript.iter().filter(|t| t.fallback).count(),
        tom_calls: r.traces.iter().map(|t| t.count(Stage::Tom)).sum(),
        verifier_calls: r.traces.iter().map(|t| t.count(Stage::Verifier)).sum(),
        aborted: r.aborted.clone(),
    }
}

fn summarize(
    order: SeatOrder,
    records: &[EpisodeRecord],
    results: &[(SeatOrder, EpisodeResult)],
) -> OrderSummary {
    let mine: Vec<&EpisodeRecord> = records.iter().filter(|r| r.order == order).collect();
    let done: Vec<&&EpisodeRecord> = mine.iter().filter(|r| r.aborted.is_none()).collect();
    let scores: Vec<f64> = done.iter().map(|r| r.score as f64).collect();
    let turns: Vec<f64> = done.iter().map(|r| r.turns as f64).collect();
    let mut lat: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (o, r) in results.iter().filter(|(o, _)| *o == order) {
        for (t, l) in r.transcript.iter().zip(&r.latencies) {
            lat[o.agent_in(t.player)].push(*l);
        }
    }
    OrderSummary {
        order,
        episodes: mine.len(),
        aborted: mine.len() - done.len(),
        score: MeanErr::of(&scores),
        turns: MeanErr::of(&turns),
        latency: [LatencyStat::of(&lat[0]), LatencyStat::of(&lat[1])],
        fallbacks: mine.iter().map(|r| r.fallbacks).sum(),
    }
}

// ---------------------------------------------------------------- export

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    /// One row per episode.
    Csv,
    /// The whole report as JSON.
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown export format {other:?}")),
        }
    }
}

pub fn write_episodes_csv<W: Write>(w: W, records: &[EpisodeRecord]) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_episodes_csv<R: Read>(r: R) -> Result<Vec<EpisodeRecord>, csv::Error> {
    csv::Reader::from_reader(r).deserialize().collect()
}

pub fn report_to_json(report: &MatchupReport) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize") + "\n"
}

pub fn report_from_json(text: &str) -> Result<MatchupReport, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn export(
    report: &MatchupReport,
    format: ExportFormat,
    path: &Path,
) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    match format {
        ExportFormat::Csv => {
            write_episodes_csv(file, &report.episodes).map_err(|e| io_err(path, e))
        }
        ExportFormat::Json => {
            let mut file = file;
            file.write_all(report_to_json(report).as_bytes())
                .map_err(|e| io_err(path, e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agent_specs_round_trip() {
        for s in [
            "scripted:rule-hanabi",
            "cac:replay:a.txt",
            "llm:http:m@http://h/v1",
        ] {
            assert_eq!(s.parse::<AgentSpec>().unwrap().to_string(), s);
        }
        assert_eq!(
            "replay:x".parse::<AgentSpec>().unwrap().to_string(),
            "llm:replay:x"
        );
        assert!("scripted:nope".parse::<AgentSpec>().is_err());
        assert!("http:nomodel".parse::<BackendSpec>().is_err());
    }

    #[test]
    fn explicit_seeds_must_match_episodes() {
        let mut cfg = MatchupConfig::new(
            GameKind::Hanabi,
            "scripted:rule-hanabi",
            "scripted:rule-hanabi",
        );
        cfg.seeds = Some(vec![1, 2]);
        assert!(cfg.validate().is_err());
        cfg.episodes = 2;
        cfg.validate().unwrap();
    }

    #[test]
    fn toml_config_with_defaults() {
        let cfg = MatchupConfig::from_toml(
            "game = \"kitchen\"\nboard = \"cramped_room\"\nagent_a = \"scripted:greedy-kitchen\"\n\
             agent_b = \"scripted:greedy-kitchen\"\nno_tom = true\n",
        )
        .unwrap();
        assert_eq!(cfg.episodes, 3);
        assert!(cfg.ablation.no_tom && !cfg.ablation.no_verify);
        assert_eq!(cfg.seed_list(), vec![Seed(0), Seed(1), Seed(2)]);
    }
}
