//! Command-line front end: `play`, `qa`, `serve` and `describe`.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use coord_core::env::EnvConfig;
use coord_core::game::{GameKind, StateRef};
use coord_core::harness::{export, run_matchup, BackendSpec, ExportFormat, MatchupConfig};
use coord_core::qa::{
    accuracy_rows, bundled_scenarios, collect_responses, load_scenarios, render_all, score_run,
    write_accuracy_csv,
};
use coord_core::Seed;

use crate::session::SessionManager;

#[derive(Debug, Parser)]
#[command(
    name = "coord-arena",
    version,
    about = "Play, evaluate and serve two-player coordination games"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a matchup between two agents and report scores.
    Play(PlayArgs),
    /// Score a backend on the multiple-choice scenario suite.
    Qa(QaArgs),
    /// Serve live sessions over HTTP.
    Serve(ServeArgs),
    /// Print what a seat sees at the start of a game.
    Describe(DescribeArgs),
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    /// TOML matchup file; flags given here override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub game: Option<GameKind>,
    /// Layout or map name, or a path to one.
    #[arg(long, alias = "layout", alias = "map")]
    pub board: Option<String>,
    #[arg(long)]
    pub agent_a: Option<String>,
    #[arg(long)]
    pub agent_b: Option<String>,
    #[arg(long)]
    pub episodes: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Explicit comma-separated seeds, one per episode.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    #[arg(long)]
    pub horizon: Option<u32>,
    #[arg(long)]
    pub swap_positions: bool,
    #[arg(long)]
    pub no_tom: bool,
    #[arg(long)]
    pub no_verify: bool,
    #[arg(long)]
    pub omit_partner_info: bool,
    /// Two comma-separated player names.
    #[arg(long, value_delimiter = ',')]
    pub names: Option<Vec<String>>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub max_turns: Option<usize>,
    /// Write episodes to a .csv or the whole report to a .json file.
    #[arg(long)]
    pub out: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QaArgs {
    /// `replay:<file>` or `http:<model>@<endpoint>`.
    #[arg(long)]
    pub backend: BackendSpec,
    /// Scenario JSONL file; the bundled set otherwise.
    #[arg(long)]
    pub scenarios: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    #[arg(long, default_value_t = 4)]
    pub workers: usize,
    /// Model name written to the accuracy table.
    #[arg(long)]
    pub model: Option<String>,
    /// Accuracy table, one row per category and trial.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the rendered questions as JSON lines.
    #[arg(long)]
    pub items_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: String,
    /// Seconds an agent seat may think before the safe fallback is played.
    #[arg(long, default_value_t = 120)]
    pub agent_timeout: u64,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    pub game: GameKind,
    #[arg(long, alias = "layout", alias = "map")]
    pub board: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub seat: usize,
    /// Dump the full engine state as JSON instead of the text views.
    #[arg(long)]
    pub state: bool,
}

impl PlayArgs {
    /// The config file (if any) with every given flag laid over it.
    pub fn matchup(&self) -> Result<MatchupConfig> {
        let mut cfg = match &self.config {
            Some(path) => MatchupConfig::load(path)?,
            None => {
                let (Some(game), Some(a), Some(b)) = (self.game, &self.agent_a, &self.agent_b)
                else {
                    bail!("--game, --agent-a and --agent-b are required without --config");
                };
                MatchupConfig::new(game, a.clone(), b.clone())
            }
        };
        if let Some(g) = self.game {
            cfg.game = g;
        }
        if let Some(b) = &self.board {
            cfg.board = Some(b.clone());
        }
        if let Some(a) = &self.agent_a {
            cfg.agent_a = a.clone();
        }
        if let Some(b) = &self.agent_b {
            cfg.agent_b = b.clone();
        }
        if let Some(n) = self.episodes {
            cfg.episodes = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = &self.seeds {
            cfg.seeds = Some(s.clone());
            cfg.episodes = s.len();
        }
        if let Some(h) = self.horizon {
            cfg.horizon = Some(h);
        }
        cfg.swap_positions |= self.swap_positions;
        cfg.ablation.no_tom |= self.no_tom;
        cfg.ablation.no_verify |= self.no_verify;
        cfg.omit_partner_info |= self.omit_partner_info;
        if let Some(n) = &self.names {
            cfg.player_names = Some(n.clone());
        }
        if let Some(w) = self.workers {
            cfg.max_workers = w;
        }
        if let Some(t) = self.max_turns {
            cfg.max_turns = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn format_for(path: &Path) -> Result<ExportFormat> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    ext.parse()
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn play(args: &PlayArgs) -> Result<()> {
    let cfg = args.matchup()?;
    let formats: Vec<ExportFormat> = args
        .out
        .iter()
        .map(|p| format_for(p))
        .collect::<Result<_>>()?;
    let run = run_matchup(&cfg)?;
    print!("{}", run.report.render());
    for (path, format) in args.out.iter().zip(formats) {
        export(&run.report, format, path).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

pub fn qa(args: &QaArgs) -> Result<()> {
    let records = match &args.scenarios {
        Some(path) => load_scenarios(path)?,
        None => bundled_scenarios().to_vec(),
    };
    let items = render_all(&records)?;
    if let Some(path) = &args.items_out {
        let lines: Vec<String> = items
            .iter()
            .map(|i| serde_json::to_string(i).expect("items serialize"))
            .collect();
        std::fs::write(path, lines.join("\n") + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let backend = args.backend.build()?;
    let responses = collect_responses(&items, backend.as_ref(), args.trials, args.workers)?;
    let score = score_run(&items, &responses, args.trials)?;
    println!(
        "{:<14} {:>8} {:>8} {:>9}",
        "category", "accuracy", "random", "unmatched"
    );
    for c in &score.categories {
        let unmatched: usize = c.trials.iter().map(|t| t.unmatched).sum();
        println!(
            "{:<14} {:>8.3} {:>8.3} {:>9}",
            c.category.to_string(),
            c.mean_accuracy,
            c.random_baseline,
            unmatched
        );
    }
    if let Some(path) = &args.out {
        let model = args
            .model
            .clone()
            .unwrap_or_else(|| args.backend.to_string());
        let file =
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_accuracy_csv(file, &accuracy_rows(&model, &score))?;
    }
    Ok(())
}

pub fn describe(args: &DescribeArgs) -> Result<String> {
    let mut cfg = EnvConfig::new(args.game);
    cfg.board = args.board.clone();
    let env = cfg.build(Seed(args.seed))?;
    if args.seat >= env.player_count() {
        bail!("no seat {}", args.seat);
    }
    if args.state {
        let json = match env.state() {
            StateRef::Hanabi(s) => serde_json::to_string_pretty(s),
            StateRef::Kitchen(s) => serde_json::to_string_pretty(s),
            StateRef::Pursuit(s) => serde_json::to_string_pretty(s),
        }?;
        return Ok(json + "\n");
    }
    Ok(format!(
        "{}\n\n{}\n",
        env.description(args.seat).trim_end(),
        env.observation(args.seat).trim_end()
    ))
}

pub async fn serve(args: &ServeArgs) -> Result<()> {
    let manager = Arc::new(SessionManager::new(Duration::from_secs(args.agent_timeout)));
    crate::server::serve(&args.addr, manager).await?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Play(a) => play(&a),
        Command::Qa(a) => qa(&a),
        Command::Describe(a) => {
            print!("{}", describe(&a)?);
            Ok(())
        }
        Command::Serve(a) => tokio::runtime::Runtime::new()?.block_on(serve(&a)),
    }
}
