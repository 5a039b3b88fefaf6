//! One agent decision with the full pipeline: partner modelling, planning and
//! self-checking, answered by scripted backends. The verifier turns down the
//! first proposal, so the trace shows the re-plan.
//!
//! cargo run --example cac_agent_trace

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use coord_core::agent::{CacAgent, CacConfig};
use coord_core::backend::{FnBackend, ReplayBackend};
use coord_core::env::EnvConfig;
use coord_core::game::DecisionView;
use coord_core::{Agent, GameKind, Seed};

fn main() -> anyhow::Result<()> {
    let mut env = EnvConfig::new(GameKind::Capture).build(Seed(0))?;
    // Let the partner move once so there is something to explain.
    env.step(&[(0, 0), (1, 0)])?;

    let planner = Arc::new(ReplayBackend::new([
        "Bob is close to the thief.\nAction: A",
        "Then I hold position.\nAction: Stay in current Room",
    ]));
    let tom = Arc::new(ReplayBackend::new([
        "Partner Action Explanation: Bob is closing in from the other side.\nPartner Future Intent: trap the thief.",
    ]));
    let seen = Arc::new(AtomicUsize::new(0));
    let counter = seen.clone();
    let verifier = Arc::new(FnBackend::new("picky", move |_msgs| {
        Ok(if counter.fetch_add(1, Ordering::SeqCst) == 0 {
            "That leaves the door open.\nVerification: Not Okay".to_string()
        } else {
            "Verification: Okay".to_string()
        })
    }));
    let mut agent = CacAgent::new(
        "alice",
        CacConfig::new(planner)
            .with_tom(tom)
            .with_verifier(verifier),
    );

    let (obs, desc, legal) = (env.observation(0), env.description(0), env.legal_actions(0));
    let partner_move = env.legal_actions(1).into_iter().next();
    let decision = agent.decide(&DecisionView {
        game: GameKind::Capture,
        player: 0,
        player_names: env.player_names(),
        description: &desc,
        observation: &obs,
        legal: &legal,
        partner_last: partner_move.as_ref(),
        state: env.state(),
    })?;
    println!(
        "chose {:?} (fallback: {})",
        legal[decision.index].label, decision.fallback
    );
    for call in decision.trace.iter().flat_map(|t| &t.calls) {
        let first = call.response.lines().next().unwrap_or("");
        println!(
            "{:?}: {first} -> {:?} {:?}",
            call.stage, call.action, call.verdict
        );
    }
    Ok(())
}
