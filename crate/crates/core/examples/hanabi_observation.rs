//! What a Hanabi player is shown, and how a full game reads move by move.
//!
//! cargo run --example hanabi_observation -- 7

use coord_core::backend::scripted::oracle_hanabi;
use coord_core::env::EnvConfig;
use coord_core::hanabi::{deal, Outcome};
use coord_core::{GameKind, Seed};

fn main() -> anyhow::Result<()> {
    let seed = std::env::args().nth(1).map_or(Ok(7), |s| s.parse())?;
    let env = EnvConfig::new(GameKind::Hanabi).build(Seed(seed))?;
    println!("{}\n", env.observation(0));

    // The oracle peeks at every hand; it bounds what any pair could score.
    let mut state = deal(Seed(seed));
    while !state.is_terminal() {
        let mv = oracle_hanabi(&state);
        let who = state.player_names[state.current_player].clone();
        let label = state.move_label(mv);
        let outcome = state.apply_move(mv);
        let note = match outcome {
            Outcome::Played {
                card,
                success: false,
                ..
            } => format!("  (misplayed {card})"),
            _ => String::new(),
        };
        println!("{:>3} {who:<6} {label}{note}", state.turn);
    }
    println!(
        "final score {} with {} lives left",
        state.score(),
        state.lives
    );
    Ok(())
}
