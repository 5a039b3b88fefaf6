//! Scripted self-play on every game: a quick sanity check of the engines.
//!
//! cargo run --example scripted_baselines

use coord_core::backend::scripted::{ScriptedAgent, ScriptedPolicy};
use coord_core::env::{run_episode, EnvConfig};
use coord_core::{Agent, GameKind, Seed};

fn pair(policy: ScriptedPolicy, seed: u64) -> Vec<Box<dyn Agent>> {
    vec![
        Box::new(ScriptedAgent::new(policy, Seed(seed))),
        Box::new(ScriptedAgent::new(policy, Seed(seed + 1))),
    ]
}

fn main() -> anyhow::Result<()> {
    let runs = [
        (GameKind::Hanabi, None, ScriptedPolicy::RuleHanabi),
        (GameKind::Hanabi, None, ScriptedPolicy::OracleHanabi),
        (
            GameKind::Kitchen,
            Some("cramped_room"),
            ScriptedPolicy::GreedyKitchen,
        ),
        (
            GameKind::Kitchen,
            Some("asymmetric_advantages"),
            ScriptedPolicy::GreedyKitchen,
        ),
        (
            GameKind::Kitchen,
            Some("coordination_ring"),
            ScriptedPolicy::GreedyKitchen,
        ),
        (
            GameKind::Kitchen,
            Some("forced_coordination"),
            ScriptedPolicy::GreedyKitchen,
        ),
        (
            GameKind::Kitchen,
            Some("counter_circuit"),
            ScriptedPolicy::GreedyKitchen,
        ),
        (GameKind::Capture, None, ScriptedPolicy::GreedyPursuit),
        (GameKind::Escape, None, ScriptedPolicy::GreedyPursuit),
    ];
    for (game, board, policy) in runs {
        let mut config = EnvConfig::new(game);
        if let Some(b) = board {
            config = config.with_board(b);
        }
        let mut scores = Vec::new();
        let mut steps = Vec::new();
        for seed in 0..20 {
            let result = run_episode(&config, &mut pair(policy, seed), 100_000, Seed(seed))?;
            scores.push(result.score);
            steps.push(result.steps);
        }
        let mean = scores.iter().sum::<u32>() as f64 / scores.len() as f64;
        println!(
            "{game:<8} {:<22} {policy:<15} mean score {mean:5.2}  scores {scores:?} steps {steps:?}",
            config.board_name()
        );
    }
    Ok(())
}
