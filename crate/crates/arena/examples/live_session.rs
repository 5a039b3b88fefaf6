//! A human seat played from code against a scripted partner, in process.
//! Prints the event log as it would stream to a browser.
//!
//! cargo run -p coord-arena --example live_session

use std::time::Duration;

use coord_arena::session::{CreateRequest, SessionManager, Status};
use coord_arena::view::{Render, ViewDoc};
use coord_core::GameKind;

fn main() -> anyhow::Result<()> {
    let manager = SessionManager::new(Duration::from_secs(5));
    let session = manager.create(&CreateRequest {
        game: GameKind::Hanabi,
        board: None,
        seats: vec!["human".into(), "scripted:rule-hanabi".into()],
        seed: 5,
        horizon: None,
        names: Some(vec!["You".into(), PARTNER.into()]),
    })?;
    loop {
        session.drive(manager.agent_timeout);
        let view = session.view(0)?;
        if view.status == Status::Finished {
            break;
        }
        let label = choose(&view);
        let pick = view
            .legal
            .iter()
            .find(|a| a.label == label)
            .unwrap_or(&view.legal[0]);
        session.submit(0, &pick.id)?;
    }
    for event in session.log() {
        println!("{}", serde_json::to_string(&event)?);
    }
    let view = session.view(0)?;
    println!(
        "\nscore {} after {} moves",
        view.seat.score,
        view.transcript.len()
    );
    Ok(())
}

const PARTNER: &str = "Robo";

fn sets(k: &impl serde::Serialize) -> (Vec<String>, Vec<u64>) {
    let v = serde_json::to_value(k).expect("knowledge serializes");
    let colors = v["colors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap().to_string())
        .collect();
    let ranks = v["ranks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_u64().unwrap())
        .collect();
    (colors, ranks)
}

/// Play what is surely playable, clue a playable partner card, else discard the oldest.
/// Reads nothing but the seat's own view.
fn choose(view: &ViewDoc) -> String {
    let Render::Hanabi {
        stacks,
        own_hand,
        partner_hand,
        partner_knowledge,
        reveal_tokens,
        ..
    } = &view.seat.render
    else {
        unreachable!("this demo plays Hanabi")
    };
    let next = |color: &str| {
        stacks
            .iter()
            .find(|s| format!("{:?}", s.color) == color)
            .map(|s| s.height as u64 + 1)
    };
    for (slot, k) in own_hand.iter().enumerate() {
        let (colors, ranks) = sets(k);
        if colors.len() == 1 && ranks.len() == 1 && next(&colors[0]) == Some(ranks[0]) {
            return format!("Play my Card {slot}");
        }
    }
    if *reveal_tokens > 0 {
        for (card, k) in partner_hand.iter().zip(partner_knowledge) {
            let (color, rank) = card.split_once(' ').unwrap();
            if next(color) != rank.parse().ok() {
                continue;
            }
            let (colors, ranks) = sets(k);
            if colors.len() > 1 {
                return format!("Reveal {PARTNER}'s {color} color cards");
            }
            if ranks.len() > 1 {
                return format!("Reveal {PARTNER}'s rank {rank} cards");
            }
        }
    }
    "Discard my Card 0".into()
}
