use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use coord_core::agent::{
    fallback_index, parse_action, AgentError, CacAgent, CacConfig, FallbackRule, Stage,
};
use coord_core::backend::{BackendError, BackendRef, FnBackend, ReplayBackend};
use coord_core::env::EnvConfig;
use coord_core::game::{option_letter, ActionId, Agent, Decision, DecisionView, GameEnv, GameKind};
use coord_core::rng::{make_rng, Seed};
use proptest::prelude::*;

const GAMES: [GameKind; 4] = [
    GameKind::Hanabi,
    GameKind::Kitchen,
    GameKind::Capture,
    GameKind::Escape,
];

fn env(game: GameKind, seed: u64) -> Box<dyn GameEnv> {
    EnvConfig::new(game).build(Seed(seed)).unwrap()
}

/// Walk a random legal playout and collect every distinct label list seen on the way.
fn label_sets(game: GameKind, seed: u64, steps: usize) -> Vec<Vec<String>> {
    let mut e = env(game, seed);
    let mut rng = make_rng(Seed(seed));
    let mut out = Vec::new();
    for _ in 0..steps {
        if e.is_terminal() {
            break;
        }
        let mut decisions = Vec::new();
        for p in e.pending() {
            let legal = e.legal_actions(p);
            out.push(legal.iter().map(|a| a.label.clone()).collect());
            decisions.push((p, rng.index(legal.len())));
        }
        e.step(&decisions).unwrap();
    }
    out
}

fn decide_with(
    agent: &mut CacAgent,
    e: &dyn GameEnv,
    partner_last: Option<&ActionId>,
) -> Result<Decision, AgentError> {
    let p = e.pending()[0];
    let legal = e.legal_actions(p);
    let observation = e.observation(p);
    let description = e.description(p);
    let view = DecisionView {
        game: e.kind(),
        player: p,
        player_names: e.player_names(),
        description: &description,
        observation: &observation,
        legal: &legal,
        partner_last,
        state: e.state(),
    };
    agent.decide(&view)
}

fn replay<I: IntoIterator<Item = S>, S: Into<String>>(replies: I) -> BackendRef {
    Arc::new(ReplayBackend::new(replies))
}

#[test]
fn every_label_parses_back_to_itself() {
    for game in GAMES {
        for seed in 0..5 {
            for labels in label_sets(game, seed, 40) {
                let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
                for (i, label) in labels.iter().enumerate() {
                    let variants = [
                        label.clone(),
                        format!("Action: {label}"),
                        format!("Thinking it over.\nAction:{}", label.to_uppercase()),
                        format!("Action: {}", label.trim_end_matches('.')),
                        format!("Action:   {label}  \n"),
                    ];
                    for v in variants {
                        assert_eq!(
                            parse_action(&v, &refs, game.lettered(), 0.6, 0.1),
                            Ok(i),
                            "{game:?} {v:?}"
                        );
                    }
                    if game.lettered() {
                        let letter = option_letter(i);
                        for v in [
                            format!("Action: {letter}"),
                            format!("{letter}. {label}"),
                            format!("Answer: ({letter})"),
                        ] {
                            assert_eq!(parse_action(&v, &refs, true, 0.6, 0.1), Ok(i), "{v:?}");
                        }
                    }
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn perturbed_labels_still_ground(seed in 0u64..200, pick in any::<prop::sample::Index>(), game_ix in 0usize..4,
                                     upper in any::<bool>(), strip in any::<bool>(), pad in 0usize..4) {
        let game = GAMES[game_ix];
        let sets = label_sets(game, seed, 10);
        let labels = &sets[seed as usize % sets.len()];
        let i = pick.index(labels.len());
        let mut text = labels[i].clone();
        if upper {
            text = text.to_uppercase();
        }
        if strip {
            text = text.replace(['.', '\''], "");
        }
        let text = format!("Action:{}{}", " ".repeat(pad), text);
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        prop_assert_eq!(parse_action(&text, &refs, game.lettered(), 0.6, 0.1), Ok(i));
    }
}

/// Reply generator for the fuzz: mostly garbage, sometimes nearly valid.
fn malformed(rng: &mut impl FnMut(usize) -> usize) -> String {
    const WORDS: [&str; 12] = [
        "Action:",
        "the",
        "Card",
        "Room",
        "onion",
        "Z.",
        "???",
        "Reveal",
        "\n",
        "42",
        "Verification: Okay",
        "--",
    ];
    match rng(5) {
        0 => String::new(),
        1 => (0..rng(40))
            .map(|_| (b'!' + rng(90) as u8) as char)
            .collect(),
        2 => (0..rng(12))
            .map(|_| WORDS[rng(WORDS.len())])
            .collect::<Vec<_>>()
            .join(" "),
        3 => "Action: ".repeat(rng(4)),
        _ => "\u{1F600} no idea \u{00e9}\u{00e8}".to_string(),
    }
}

#[test]
fn thousand_malformed_replies_never_escape_the_legal_set() {
    let mut r = make_rng(Seed(77));
    let mut pick = move |n: usize| r.index(n.max(1));
    let mut fallbacks = 0;
    for trial in 0..1000 {
        let game = GAMES[trial % 4];
        let e = env(game, trial as u64);
        let replies: Vec<String> = (0..3).map(|_| malformed(&mut pick)).collect();
        let mut agent = CacAgent::new("fuzz", CacConfig::new(replay(replies.clone())));
        let d = decide_with(&mut agent, e.as_ref(), None).unwrap();
        let p = e.pending()[0];
        let legal = e.legal_actions(p);
        assert!(d.index < legal.len());
        let labels: Vec<&str> = legal.iter().map(|a| a.label.as_str()).collect();
        let any_parsed = replies
            .iter()
            .any(|r| parse_action(r, &labels, game.lettered(), 0.6, 0.1).is_ok());
        assert_eq!(d.fallback, !any_parsed, "{replies:?}");
        if d.fallback {
            fallbacks += 1;
            assert_eq!(
                d.index,
                fallback_index(FallbackRule::Safest, game, &legal, e.state())
            );
            assert_eq!(d.trace.as_ref().unwrap().count(Stage::Planner), 3);
        }
    }
    assert!(fallbacks > 500, "only {fallbacks} fallbacks");
}

#[test]
fn safest_fallback_per_game() {
    for game in GAMES {
        let e = env(game, 1);
        let mut agent = CacAgent::new("x", CacConfig::new(replay(["", "", ""])));
        let d = decide_with(&mut agent, e.as_ref(), None).unwrap();
        assert!(d.fallback);
        let label = &e.legal_actions(e.pending()[0])[d.index].label;
        let expect = match game {
            GameKind::Hanabi => "Discard my Card 0",
            GameKind::Kitchen => "wait.",
            _ => "Stay in current Room",
        };
        // A fresh Hanabi deal starts at 8 tokens, where discarding is illegal.
        if game == GameKind::Hanabi {
            assert!(label.starts_with("Reveal"), "{label}");
        } else {
            assert_eq!(label, expect);
        }
    }
}

#[test]
fn reask_after_unparseable_reply() {
    let e = env(GameKind::Kitchen, 0);
    let prompts = Arc::new(Mutex::new(Vec::new()));
    let seen = prompts.clone();
    let n = Arc::new(AtomicUsize::new(0));
    let planner: BackendRef = Arc::new(FnBackend::new("p", move |m| {
        seen.lock().unwrap().push(m.last().unwrap().content.clone());
        Ok(if n.fetch_add(1, Ordering::SeqCst) == 0 {
            "hmm".into()
        } else {
            "Action: wait.".into()
        })
    }));
    let mut agent = CacAgent::new("x", CacConfig::new(planner));
    let d = decide_with(&mut agent, e.as_ref(), None).unwrap();
    assert!(!d.fallback);
    assert_eq!(d.trace.unwrap().chosen, "wait.");
    let prompts = prompts.lock().unwrap();
    assert_eq!(prompts.len(), 2);
    assert!(!prompts[0].contains("did not name"));
    assert!(prompts[1].contains("did not name one of the available actions"));
}

fn partner_action(game: GameKind) -> ActionId {
    let label = match game {
        GameKind::Hanabi => "Reveal Alice's Rank 1 Cards",
        GameKind::Kitchen => "wait.",
        _ => "Stay in current Room",
    };
    ActionId {
        game,
        index: 0,
        label: label.into(),
    }
}

#[test]
fn ablations_remove_their_calls() {
    let e = env(GameKind::Kitchen, 0);
    let last = partner_action(GameKind::Kitchen);
    let planner = || replay(["Action: wait."; 4]);
    let tom = || replay(["Partner Action Explanation: idle\nClue Suggestion: none"; 2]);
    let ok = || replay(["Verification: Okay"; 2]);

    let full = CacConfig::new(planner())
        .with_tom(tom())
        .with_verifier(ok());
    let t = decide_with(&mut CacAgent::new("a", full), e.as_ref(), Some(&last))
        .unwrap()
        .trace
        .unwrap();
    assert_eq!(
        (
            t.count(Stage::Planner),
            t.count(Stage::Tom),
            t.count(Stage::Verifier)
        ),
        (1, 1, 1)
    );
    assert!(t.tom.is_some());

    let no_tom = CacConfig::new(planner()).with_verifier(ok());
    let t = decide_with(&mut CacAgent::new("a", no_tom), e.as_ref(), Some(&last))
        .unwrap()
        .trace
        .unwrap();
    assert_eq!((t.count(Stage::Tom), t.count(Stage::Verifier)), (0, 1));

    let no_verify = CacConfig::new(planner()).with_tom(tom());
    let t = decide_with(&mut CacAgent::new("a", no_verify), e.as_ref(), Some(&last))
        .unwrap()
        .trace
        .unwrap();
    assert_eq!((t.count(Stage::Tom), t.count(Stage::Verifier)), (1, 0));

    // Nothing to explain before the partner has moved.
    let full = CacConfig::new(planner())
        .with_tom(tom())
        .with_verifier(ok());
    let t = decide_with(&mut CacAgent::new("a", full), e.as_ref(), None)
        .unwrap()
        .trace
        .unwrap();
    assert_eq!(t.count(Stage::Tom), 0);
}

#[test]
fn verifier_rejections_drive_replanning() {
    let e = env(GameKind::Hanabi, 4);
    let legal = e.legal_actions(0);
    let labels: Vec<String> = legal.iter().map(|a| a.label.clone()).collect();
    let planner = replay(labels[..3].iter().map(|l| format!("Action: {l}")));
    let verifier = replay([
        "Verification: Not Okay",
        "Verification: Not Okay",
        "Verification: Okay",
    ]);
    let cfg = CacConfig::new(planner).with_verifier(verifier);
    let d = decide_with(&mut CacAgent::new("a", cfg), e.as_ref(), None).unwrap();
    let t = d.trace.unwrap();
    assert_eq!(t.count(Stage::Planner), 3);
    assert_eq!(t.count(Stage::Verifier), 3);
    assert_eq!(d.index, 2);
    assert!(!d.fallback);
    let planner_prompts: Vec<&str> = t
        .calls
        .iter()
        .filter(|c| c.stage == Stage::Planner)
        .map(|c| c.prompt.last().unwrap().content.as_str())
        .collect();
    assert!(!planner_prompts[0].contains("Do not choose"));
    assert!(planner_prompts[2].contains(&format!(
        "Do not choose the following action(s): {}, {}.",
        labels[0], labels[1]
    )));
}

#[test]
fn verifier_that_never_agrees_ends_in_fallback() {
    let e = env(GameKind::Capture, 0);
    let labels: Vec<String> = e.legal_actions(0).iter().map(|a| a.label.clone()).collect();
    let planner = replay(labels.iter().map(|l| format!("Action: {l}")));
    let verifier = replay(["Verification: Not Okay"; 10]);
    let cfg = CacConfig::new(planner).with_verifier(verifier);
    let d = decide_with(&mut CacAgent::new("a", cfg), e.as_ref(), None).unwrap();
    assert!(d.fallback);
    assert_eq!(labels[d.index], "Stay in current Room");
    let t = d.trace.unwrap();
    assert_eq!(t.count(Stage::Verifier), labels.len().min(4));
}

#[test]
fn backend_failure_is_an_error_not_a_guess() {
    let e = env(GameKind::Kitchen, 0);
    let planner: BackendRef = Arc::new(FnBackend::new("down", |_| {
        Err(BackendError::ReplayExhausted)
    }));
    let err = decide_with(
        &mut CacAgent::new("a", CacConfig::new(planner)),
        e.as_ref(),
        None,
    )
    .unwrap_err();
    assert!(matches!(err, AgentError::Backend(_)));
}

#[test]
fn episodic_memory_records_own_actions() {
    let mut e = env(GameKind::Kitchen, 0);
    let mut agent = CacAgent::new(
        "a",
        CacConfig::new(replay(["Action: wait.", "Action: move away."])),
    );
    let d = decide_with(&mut agent, e.as_ref(), None).unwrap();
    e.step(&[(0, d.index), (1, 0)]).unwrap();
    decide_with(&mut agent, e.as_ref(), None).unwrap();
    assert_eq!(agent.context().episodic, vec!["wait.", "move away."]);
    assert!(agent
        .context()
        .working
        .starts_with("My Action History: [wait.]"));
}
