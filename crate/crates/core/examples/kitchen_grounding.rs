//! Macro-actions in the kitchen: the legal list a chef sees, and the
//! primitive moves each one expands to.
//!
//! cargo run --example kitchen_grounding -- cramped_room

use std::sync::Arc;

use coord_core::kitchen::{bundled_layout, ground, macro_actions, KitchenState};

fn main() -> anyhow::Result<()> {
    let name = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "cramped_room".into());
    let layout =
        bundled_layout(&name).ok_or_else(|| anyhow::anyhow!("no bundled layout {name}"))?;
    println!("{}\n", layout.to_text());
    let state = KitchenState::new(Arc::new(layout), vec!["Alice".into(), "Bob".into()]);
    for player in 0..2 {
        println!("{}:", state.player_names[player]);
        for option in macro_actions(&state, player) {
            let plan = match ground(&state, player, option.action) {
                Ok(prims) => format!("{prims:?}"),
                Err(e) => format!("not now: {e}"),
            };
            let mark = if option.feasible { ' ' } else { 'x' };
            println!("  {mark} {:<36} {plan}", option.action.label());
        }
    }
    Ok(())
}
