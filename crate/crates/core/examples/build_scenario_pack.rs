//! Author the bundled question pack.
//!
//! Every scenario is built from explicit engine states, and each gold answer
//! is checked against the engine before the record is written: kitchen golds
//! must be feasible macros, room-graph golds must start a fastest winning line
//! and be the only first move that does.
//!
//! ```text
//! cargo run --example build_scenario_pack -- data/scenarios/coordination_qa.jsonl
//! ```

use std::sync::Arc;

use coord_core::backend::scripted::rounds_to_win;
use coord_core::hanabi::{deal, full_deck, Card, CardKnowledge, Color, HanabiState};
use coord_core::kitchen::{bundled_layout, CookerStatus, Item, KitchenState, Pos};
use coord_core::pursuit::{bundled_map, PursuitMode, PursuitMove, PursuitState};
use coord_core::qa::{render_all, write_scenarios, QuestionSpec, ScenarioRecord, Snapshot};
use coord_core::Seed;

use Color::{Blue, Green, Red, White, Yellow};

fn names() -> Vec<String> {
    vec!["Alice".into(), "Bob".into()]
}

fn c(color: Color, rank: u8) -> Card {
    Card::new(color, rank)
}

/// Hanabi state with the given hands, stacks and discards; the deck holds the rest.
fn hanabi(alice: &[Card], bob: &[Card], stacks: [u8; 5], discards: &[Card]) -> HanabiState {
    let mut s = deal(Seed(0));
    let mut deck = full_deck();
    let mut take = |card: Card| {
        let i = deck
            .iter()
            .position(|d| *d == card)
            .unwrap_or_else(|| panic!("no copy of {card} left"));
        deck.remove(i);
    };
    for &card in alice.iter().chain(bob).chain(discards) {
        take(card);
    }
    for (ci, color) in Color::ALL.iter().enumerate() {
        for r in 1..=stacks[ci] {
            take(c(*color, r));
        }
    }
    s.deck = deck;
    s.hands = vec![alice.to_vec(), bob.to_vec()];
    s.knowledge = vec![
        vec![CardKnowledge::unknown(); alice.len()],
        vec![CardKnowledge::unknown(); bob.len()],
    ];
    s.stacks = stacks;
    s.discard_pile = discards.to_vec();
    s
}

fn record(id: &str, player: usize, snapshot: Snapshot) -> ScenarioRecord {
    ScenarioRecord {
        id: id.into(),
        player,
        snapshot,
        ec: None,
        tom: None,
        jp: None,
    }
}

fn hanabi_scenarios() -> Vec<ScenarioRecord> {
    let mut out = Vec::new();

    // Fresh deal; only one rank clue singles out the playable White 1.
    let s = hanabi(
        &[
            c(Yellow, 2),
            c(Blue, 1),
            c(Red, 4),
            c(Green, 5),
            c(Yellow, 3),
        ],
        &[c(Red, 3), c(White, 1), c(Green, 3), c(White, 4), c(Blue, 4)],
        [0; 5],
        &[],
    );
    let mut r = record("hanabi-fresh-deal", 0, Snapshot::Hanabi(s));
    r.ec = Some(QuestionSpec::authored(
        "How many cards are left in the deck?",
        ["50.", "45.", "40.", "35."],
        "40.",
    ));
    r.tom = Some(QuestionSpec::authored(
        "What information about his cards should I reveal to my partner so that he knows to play a card on his turn?",
        [
            "Reveal Bob's Red color cards.",
            "Reveal Bob's White color cards.",
            "Reveal Bob's Green color cards.",
            "Reveal Bob's Blue color cards.",
            "Reveal Bob's rank 1 cards.",
            "Reveal Bob's rank 3 cards.",
            "Reveal Bob's rank 4 cards.",
        ],
        "Reveal Bob's rank 1 cards.",
    ));
    r.jp = Some(QuestionSpec::gold("Reveal Bob's rank 1 cards"));
    out.push(r);

    // Late game: my Card 4 is a known White 5 and White sits at 4.
    let mut s = hanabi(
        &[
            c(Green, 4),
            c(Yellow, 5),
            c(Red, 2),
            c(Yellow, 3),
            c(White, 5),
        ],
        &[c(Yellow, 1), c(Blue, 1), c(Blue, 1), c(Red, 3), c(Green, 3)],
        [1, 2, 1, 4, 3],
        &[
            c(Yellow, 4),
            c(Blue, 2),
            c(Blue, 3),
            c(White, 2),
            c(White, 3),
            c(White, 4),
        ],
    );
    s.reveal_tokens = 1;
    s.lives = 2;
    s.turn = 26;
    s.knowledge[0][1] = CardKnowledge::from_sets(&Color::ALL, &[1, 2, 3, 5]);
    s.knowledge[0][2] = CardKnowledge::from_sets(&Color::ALL, &[1, 2, 3, 5]);
    s.knowledge[0][3] = CardKnowledge::from_sets(&[Red, Yellow, Green, Blue], &[3]);
    s.knowledge[0][4] = CardKnowledge::from_sets(&[White], &[5]);
    s.knowledge[1][3] = CardKnowledge::from_sets(&[Red, Yellow, Green, Blue], &[3]);
    s.knowledge[1][4] = CardKnowledge::from_sets(&[Red, Yellow, Green, Blue], &[3]);
    s.history[0] = [
        "Reveal Bob's Rank 2 Cards",
        "Reveal Bob's Rank 5 Cards",
        "Play Card 1",
        "Reveal Bob's Rank 1 Cards",
        "Discard Card 0",
        "Reveal Bob's Rank 3 Cards",
        "Discard Card 3",
        "Discard Card 1",
    ]
    .map(String::from)
    .to_vec();
    let mut r = record("hanabi-white-five", 0, Snapshot::Hanabi(s));
    r.ec = Some(QuestionSpec::authored(
        "Which card can be played on the White stack?",
        [
            "White 4.",
            "White 5.",
            "White 1.",
            "No card, the White stack is full.",
        ],
        "White 5.",
    ));
    let plays = (0..5).map(|i| format!("I should Play Card {i}"));
    let discards = (0..5).map(|i| format!("I should Discard Card {i}"));
    r.tom = Some(QuestionSpec::authored(
        "What can I infer from my partner's previous action?",
        plays.chain(discards).collect::<Vec<_>>(),
        "I should Play Card 4",
    ));
    r.jp = Some(QuestionSpec::gold("Play my Card 4"));
    out.push(r);

    // Bob's Red clue touched only my Card 2.
    let mut s = hanabi(
        &[
            c(Green, 2),
            c(Blue, 4),
            c(Red, 1),
            c(White, 3),
            c(Yellow, 4),
        ],
        &[
            c(Green, 1),
            c(Yellow, 2),
            c(Red, 5),
            c(Blue, 3),
            c(White, 2),
        ],
        [0; 5],
        &[],
    );
    s.reveal_tokens = 7;
    s.turn = 1;
    s.knowledge[0][2] = CardKnowledge::from_sets(&[Red], &[1, 2, 3, 4, 5]);
    for i in [0, 1, 3, 4] {
        s.knowledge[0][i] =
            CardKnowledge::from_sets(&[Yellow, Green, White, Blue], &[1, 2, 3, 4, 5]);
    }
    s.history[1] = vec!["Reveal Alice's Red Color Cards".into()];
    let mut r = record("hanabi-play-clue", 0, Snapshot::Hanabi(s));
    r.ec = Some(QuestionSpec::authored(
        "How many reveal tokens are left?",
        ["8.", "7.", "6.", "0."],
        "7.",
    ));
    let plays = (0..5).map(|i| format!("I should Play Card {i}"));
    let discards = (0..5).map(|i| format!("I should Discard Card {i}"));
    r.tom = Some(QuestionSpec::authored(
        "What can I infer from my partner's previous action?",
        plays.chain(discards).collect::<Vec<_>>(),
        "I should Play Card 2",
    ));
    r.jp = Some(QuestionSpec::gold("Play my Card 2"));
    out.push(r);

    // Bob's oldest unclued card is a Blue 5; discarding it would cap Blue at 4.
    let mut s = hanabi(
        &[c(Green, 3), c(Red, 4), c(Yellow, 1), c(White, 4), c(Red, 3)],
        &[
            c(Blue, 5),
            c(Green, 1),
            c(Red, 3),
            c(Yellow, 3),
            c(White, 1),
        ],
        [1, 0, 0, 0, 0],
        &[c(Yellow, 4), c(Green, 2)],
    );
    s.reveal_tokens = 3;
    s.turn = 8;
    s.knowledge[1][1] = CardKnowledge::from_sets(&[Green], &[1]);
    s.knowledge[1][4] = CardKnowledge::from_sets(&[White], &[1]);
    let mut r = record("hanabi-save-five", 0, Snapshot::Hanabi(s));
    r.ec = Some(QuestionSpec::authored(
        "How many copies of the Blue 5 are in the game?",
        ["1.", "2.", "3."],
        "1.",
    ));
    r.tom = Some(QuestionSpec::authored(
        "What information about his cards should I reveal to my partner so that he does not discard a card we cannot replace?",
        [
            "Reveal Bob's Blue color cards.",
            "Reveal Bob's Red color cards.",
            "Reveal Bob's rank 1 cards.",
            "Reveal Bob's rank 3 cards.",
            "Reveal Bob's rank 5 cards.",
        ],
        "Reveal Bob's rank 5 cards.",
    ));
    r.jp = Some(QuestionSpec::gold("Reveal Bob's rank 5 cards"));
    out.push(r);
    out
}

fn kitchen_state(layout: &str) -> KitchenState {
    KitchenState::new(
        Arc::new(bundled_layout(layout).expect("bundled layout")),
        names(),
    )
}

fn kitchen_scenarios() -> Vec<ScenarioRecord> {
    let mut out = Vec::new();

    // Split kitchen: I am on the onion side, Bob on the cooker side.
    let mut s = kitchen_state("forced_coordination");
    s.player_names = vec!["Bob".into(), "Alice".into()];
    s.chefs[0].held = Some(Item::Onion);
    s.chefs[1].pos = Pos::new(2, 1);
    s.cookers[0].onions = 3;
    s.cookers[0].status = CookerStatus::Cooking { remaining: 12 };
    s.shared[1] = Some(Item::Onion);
    s.tick = 40;
    let mut r = record("kitchen-split-cooking", 1, Snapshot::Kitchen(s));
    r.ec = Some(QuestionSpec::authored(
        "How many onions are still needed to fill up c0?",
        ["4 or more.", "3.", "2.", "1.", "0."],
        "0.",
    ));
    r.tom = Some(QuestionSpec::gold("place onion in c1."));
    r.jp = Some(QuestionSpec::gold("pick up plate from p0."));
    out.push(r);

    // Opening position in the small kitchen.
    let s = kitchen_state("cramped_room");
    let mut r = record("kitchen-opening", 0, Snapshot::Kitchen(s));
    r.ec = Some(QuestionSpec::authored(
        "How many onions are still needed to fill up c0?",
        ["4 or more.", "3.", "2.", "1.", "0."],
        "3.",
    ));
    r.tom = Some(QuestionSpec::gold("pick up onion from o1."));
    r.jp = Some(QuestionSpec::gold("pick up onion from o0."));
    out.push(r);

    // Bob carries a finished soup; the cooker is empty again.
    let mut s = kitchen_state("cramped_room");
    s.chefs[1].held = Some(Item::Soup);
    s.chefs[1].pos = Pos::new(2, 3);
    s.chefs[0].pos = Pos::new(1, 1);
    s.tick = 60;
    let mut r = record("kitchen-soup-in-hand", 0, Snapshot::Kitchen(s));
    r.ec = Some(QuestionSpec::authored(
        "What is Bob holding?",
        ["nothing.", "onion.", "plate.", "cooked soup."],
        "cooked soup.",
    ));
    r.tom = Some(QuestionSpec::gold("deliver soup in d0."));
    r.jp = Some(QuestionSpec::gold("pick up onion from o0."));
    out.push(r);

    // Two cookers; c0 is one onion short and I hold an onion.
    let mut s = kitchen_state("asymmetric_advantages");
    s.chefs[0].held = Some(Item::Onion);
    s.cookers[0].onions = 2;
    s.cookers[1].onions = 1;
    s.tick = 30;
    let mut r = record("kitchen-top-up", 0, Snapshot::Kitchen(s));
    r.ec = Some(QuestionSpec::authored(
        "Which cooker will start cooking if I add one onion to it?",
        ["c0.", "c1.", "neither."],
        "c0.",
    ));
    r.jp = Some(QuestionSpec::gold("place onion in c0."));
    out.push(r);
    out
}

fn pursuit_state(map: &str, mode: PursuitMode) -> PursuitState {
    PursuitState::new(
        Arc::new(bundled_map(map).expect("bundled map")),
        mode,
        names(),
    )
}

/// First moves of `player` that begin a fastest win, assuming the partner then plays its best.
fn winning_first_moves(s: &PursuitState, player: usize) -> Vec<PursuitMove> {
    let seat_moves = |p: usize| -> Vec<Option<PursuitMove>> {
        if s.active(p) {
            s.legal_moves(p).into_iter().map(Some).collect()
        } else {
            vec![None]
        }
    };
    let mut scored = Vec::new();
    for mine in s.legal_moves(player) {
        let best = seat_moves(1 - player)
            .into_iter()
            .filter_map(|other| {
                let mut next = s.clone();
                let mut moves = [None, None];
                moves[player] = Some(mine);
                moves[1 - player] = other;
                next.step(moves).ok()?;
                rounds_to_win(&next).map(|r| r + 1)
            })
            .min();
        if let Some(b) = best {
            scored.push((b, mine));
        }
    }
    let Some(min) = scored.iter().map(|x| x.0).min() else {
        return Vec::new();
    };
    scored
        .into_iter()
        .filter(|x| x.0 == min)
        .map(|x| x.1)
        .collect()
}

fn unique_gold(s: &PursuitState, player: usize, id: &str) -> String {
    let moves = winning_first_moves(s, player);
    assert_eq!(
        moves.len(),
        1,
        "{id}: seat {player} has several fastest first moves {moves:?}"
    );
    moves[0].to_string()
}

fn pursuit_scenarios() -> Vec<ScenarioRecord> {
    let mut out = Vec::new();

    // The bundled capture start.
    let s = pursuit_state("capture_3x3", PursuitMode::Capture);
    let mut r = record("capture-start", 0, Snapshot::pursuit(s.clone()));
    r.ec = Some(QuestionSpec::authored(
        "Which door next to the Thief's room is closed?",
        [
            "The door between Room 1 and 2.",
            "The door between Room 2 and 3.",
            "The door between Room 2 and 5.",
        ],
        "The door between Room 1 and 2.",
    ));
    // Bob can stay or step to Room 6 and still win as fast, so no partner question.
    r.jp = Some(QuestionSpec::gold(unique_gold(&s, 0, "capture-start")));
    out.push(r);

    // Thief in the corner room behind a closed door.
    let mut s = pursuit_state("capture_3x3", PursuitMode::Capture);
    s.agent_rooms = [5, 9];
    s.adversary_room = 3;
    s.turn = 4;
    let mut r = record("capture-corner", 0, Snapshot::pursuit(s.clone()));
    r.ec = Some(QuestionSpec::authored(
        "Which rooms can the Thief move to from Room 3?",
        ["Room 2 only.", "Room 2 and Room 4.", "Room 4 only."],
        "Room 2 only.",
    ));
    r.jp = Some(QuestionSpec::gold(unique_gold(&s, 0, "capture-corner")));
    out.push(r);

    // One fix left; Bob waits next to the gate.
    let mut s = pursuit_state("escape_3x3", PursuitMode::Escape);
    s.agent_rooms = [1, 8];
    s.adversary_room = 2;
    s.fixes_done = vec![2, 3];
    s.turn = 9;
    let mut r = record("escape-last-fix", 0, Snapshot::pursuit(s.clone()));
    r.ec = Some(QuestionSpec::authored(
        "If I fix the generator in Room 1, is Bob in a position to escape?",
        [
            "Yes, he's only one room away from the gate when it opens.",
            "No, the killer is blocking his path to the exit gate.",
            "No, we still need to fix the generator in Room 3.",
        ],
        "Yes, he's only one room away from the gate when it opens.",
    ));
    r.tom = Some(QuestionSpec::gold(unique_gold(&s, 1, "escape-last-fix")));
    r.jp = Some(QuestionSpec::gold(unique_gold(&s, 0, "escape-last-fix")));
    out.push(r);

    // Early game; the killer is far away.
    let mut s = pursuit_state("escape_3x3", PursuitMode::Escape);
    s.agent_rooms = [3, 4];
    s.adversary_room = 9;
    let mut r = record("escape-first-fix", 0, Snapshot::pursuit(s.clone()));
    r.ec = Some(QuestionSpec::authored(
        "How many more fixes does the generator in Room 3 need?",
        ["1.", "2.", "3."],
        "3.",
    ));
    r.jp = Some(QuestionSpec::gold(unique_gold(&s, 0, "escape-first-fix")));
    out.push(r);
    out
}

fn main() {
    let mut records = hanabi_scenarios();
    records.extend(kitchen_scenarios());
    records.extend(pursuit_scenarios());
    for r in &records {
        r.snapshot
            .validate()
            .unwrap_or_else(|e| panic!("{}: {e}", r.id));
    }
    // Fails loudly if any gold is missing from its option list.
    let items = render_all(&records).expect("every gold is an option");
    eprintln!("{} scenarios, {} questions", records.len(), items.len());
    match std::env::args().nth(1) {
        Some(path) => write_scenarios(
            std::fs::File::create(path).expect("create output"),
            &records,
        )
        .expect("write"),
        None => write_scenarios(std::io::stdout().lock(), &records).expect("write"),
    }
}
