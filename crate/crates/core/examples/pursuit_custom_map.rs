//! Load a room graph from text and play both pursuit modes on it with the
//! greedy scripted pair.
//!
//! cargo run --example pursuit_custom_map

use std::sync::Arc;

use coord_core::backend::scripted::{ScriptedAgent, ScriptedPolicy};
use coord_core::env::PursuitEnv;
use coord_core::game::play_episode;
use coord_core::pursuit::{parse_map, PursuitMode, PursuitState};
use coord_core::{Agent, Seed};

// A ring of six rooms with a shortcut; the button in 4 opens the 1-2 door.
const MAP: &str = "\
name: ring6
rooms: 1 2 3 4 5 6
door: 1 2 closed
door: 2 3
door: 3 4
door: 4 5
door: 5 6
door: 6 1
door: 2 5
button: 4 1-2
generator: 3 2
gate: 6
agents: 1 3
adversary: 5
";

fn main() -> anyhow::Result<()> {
    let map = Arc::new(parse_map(MAP)?);
    for mode in [PursuitMode::Capture, PursuitMode::Escape] {
        let state = PursuitState::new(map.clone(), mode, vec!["Alice".into(), "Bob".into()]);
        let mut env = PursuitEnv::new(state);
        let mut agents: Vec<Box<dyn Agent>> = (0..2)
            .map(|i| {
                Box::new(ScriptedAgent::new(ScriptedPolicy::GreedyPursuit, Seed(i)))
                    as Box<dyn Agent>
            })
            .collect();
        let result = play_episode(&mut env, &mut agents, 1_000, Seed(0));
        println!(
            "{mode:?}: score {} after {} rounds",
            result.score, result.steps
        );
        for line in &env.state.history[0] {
            println!("  Alice: {line}");
        }
    }
    Ok(())
}
