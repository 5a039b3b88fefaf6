//! Natural-language rendering of rules and states.
//!
//! Prose (rules, conventions, prompts) lives in template files with `{name}`
//! placeholders so wording can change without touching code. The bundled copies
//! are compiled in; [`Templates::load_dir`] reads overrides from disk.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::game::{option_letter, GameKind};
use crate::hanabi::{next_playable, CardKnowledge, Color, HanabiState};
use crate::kitchen::macros::Ranger;
use crate::kitchen::{
    closest_empty_counter, CookerStatus, KitchenLayout, KitchenState, Reach, StationKind,
};
use crate::pursuit::{PursuitMode, PursuitState, RoomGraph};

/// Observation switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObsFlags {
    /// Include the partner's inventory and location.
    pub include_partner_info: bool,
}

impl Default for ObsFlags {
    fn default() -> Self {
        ObsFlags {
            include_partner_info: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Templates {
    pub hanabi_rules: String,
    pub hanabi_conventions: String,
    pub hanabi_description: String,
    pub kitchen_rules: String,
    pub kitchen_conventions: String,
    pub kitchen_description: String,
    pub capture_description: String,
    pub escape_description: String,
    pub tom: String,
    pub verifier: String,
}

macro_rules! templates {
    ($($field:ident),* $(,)?) => {
        impl Templates {
            fn from_bundle() -> Templates {
                Templates {
                    $($field: include_str!(concat!("../data/templates/", stringify!($field), ".txt"))
                        .trim_end()
                        .to_string(),)*
                }
            }

            /// Read `<field>.txt` files from `dir`; any file that is missing keeps the bundled text.
            pub fn load_dir(dir: &Path) -> std::io::Result<Templates> {
                let mut t = Templates::bundled().clone();
                $(
                    let path = dir.join(concat!(stringify!($field), ".txt"));
                    if path.exists() {
                        t.$field = std::fs::read_to_string(&path)?.trim_end().to_string();
                    }
                )*
                Ok(t)
            }
        }
    };
}

templates!(
    hanabi_rules,
    hanabi_conventions,
    hanabi_description,
    kitchen_rules,
    kitchen_conventions,
    kitchen_description,
    capture_description,
    escape_description,
    tom,
    verifier,
);

impl Templates {
    pub fn bundled() -> &'static Templates {
        static BUNDLED: OnceLock<Templates> = OnceLock::new();
        BUNDLED.get_or_init(Templates::from_bundle)
    }
}

/// Substitute `{key}` placeholders.
pub fn fill(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (key, value) in vars {
        out = out.replace(&format!("{{{key}}}"), value);
    }
    out
}

fn me_partner(names: &[String], player: usize) -> (&str, &str) {
    (&names[player], &names[(player + 1) % names.len()])
}

/// Rules, conventions and answer format for a game, independent of layout or map.
pub fn game_description(game: GameKind, player_names: &[String], player: usize) -> String {
    let t = Templates::bundled();
    let (me, partner) = me_partner(player_names, player);
    match game {
        GameKind::Hanabi => hanabi_description(t, me, partner),
        GameKind::Kitchen => kitchen_description_with(t, me, partner, ""),
        GameKind::Capture | GameKind::Escape => {
            let template = if game == GameKind::Capture {
                &t.capture_description
            } else {
                &t.escape_description
            };
            let limit = if game == GameKind::Capture {
                PursuitMode::Capture.default_turn_limit()
            } else {
                PursuitMode::Escape.default_turn_limit()
            };
            fill(
                template,
                &[
                    ("me", me),
                    ("partner", partner),
                    ("room_count", "several"),
                    ("turn_limit", &limit.to_string()),
                ],
            )
        }
    }
}

pub fn hanabi_description(t: &Templates, me: &str, partner: &str) -> String {
    fill(
        &t.hanabi_description,
        &[
            ("rules", &t.hanabi_rules),
            ("conventions", &t.hanabi_conventions),
            ("me", me),
            ("partner", partner),
        ],
    )
}

fn kitchen_description_with(t: &Templates, me: &str, partner: &str, layout: &str) -> String {
    let text = fill(
        &t.kitchen_description,
        &[
            ("rules", &t.kitchen_rules),
            ("conventions", &t.kitchen_conventions),
            ("me", me),
            ("partner", partner),
            ("layout", layout),
        ],
    );
    text.lines()
        .map(str::trim_end)
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn kitchen_description(
    t: &Templates,
    layout: &KitchenLayout,
    names: &[String],
    player: usize,
) -> String {
    let (me, partner) = me_partner(names, player);
    kitchen_description_with(t, me, partner, &describe_layout(layout, names, player))
}

pub fn pursuit_description(t: &Templates, state: &PursuitState, player: usize) -> String {
    let (me, partner) = me_partner(&state.player_names, player);
    let template = match state.mode {
        PursuitMode::Capture => &t.capture_description,
        PursuitMode::Escape => &t.escape_description,
    };
    fill(
        template,
        &[
            ("me", me),
            ("partner", partner),
            ("room_count", &state.map.rooms.len().to_string()),
            ("turn_limit", &state.turn_limit.to_string()),
        ],
    )
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

fn join_and(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [rest @ .., last] => format!("{} and {last}", rest.join(", ")),
    }
}

/// Facility counts and, for split kitchens, who can reach what.
pub fn describe_layout(layout: &KitchenLayout, names: &[String], player: usize) -> String {
    let kinds = [
        (StationKind::Onion, "onion dispenser", "onion dispensers"),
        (StationKind::Plate, "plate dispenser", "plate dispensers"),
        (StationKind::Cooker, "cooker", "cookers"),
        (StationKind::Delivery, "delivery zone", "delivery zones"),
        (StationKind::Shared, "shared counter", "shared counters"),
    ];
    let mut parts = Vec::new();
    for (kind, one, many) in kinds {
        let ids: Vec<String> = layout.station_ids(kind).map(|s| s.to_string()).collect();
        if !ids.is_empty() {
            parts.push(format!(
                "{} ({})",
                plural(ids.len(), one, many),
                ids.join(", ")
            ));
        }
    }
    let mut out = format!(
        "The kitchen is a {} by {} grid with {}.",
        layout.width,
        layout.height,
        join_and(&parts)
    );
    let reachable = |p: usize| -> Vec<String> {
        StationKind::ALL
            .into_iter()
            .filter(|k| !matches!(k, StationKind::Counter | StationKind::Shared))
            .flat_map(|k| layout.station_ids(k))
            .filter(|&id| layout.accessible(id, p))
            .map(|id| id.to_string())
            .collect()
    };
    let split = StationKind::ALL
        .into_iter()
        .filter(|&k| k != StationKind::Counter)
        .flat_map(|k| layout.station_ids(k))
        .any(|id| layout.accessible(id, 0) != layout.accessible(id, 1));
    if split {
        let (_, partner) = me_partner(names, player);
        let other = (player + 1) % 2;
        write!(
            out,
            " The kitchen is divided into two partitions. I can reach {}. {partner} can reach {}.",
            join_and(&reachable(player)),
            join_and(&reachable(other))
        )
        .expect("string write");
    }
    out
}

/// "A. first" lines.
pub fn lettered(labels: &[String]) -> String {
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| format!("{}. {l}", option_letter(i)))
        .collect::<Vec<_>>()
        .join("\n")
}

/// The action block shown under an observation.
pub fn action_block(game: GameKind, labels: &[String]) -> String {
    if game.lettered() {
        format!("Available Actions:\n{}", lettered(labels))
    } else {
        format!("Available Actions: [{}]", labels.join(", "))
    }
}

fn knowledge_sets(k: &CardKnowledge) -> String {
    let colors: Vec<&str> = k.colors().map(Color::name).collect();
    let ranks: Vec<String> = k.ranks().map(|r| r.to_string()).collect();
    format!("[{}] [{}]", colors.join(", "), ranks.join(", "))
}

/// Hanabi state from `player`'s seat, without the action block.
pub fn hanabi_body(state: &HanabiState, player: usize) -> String {
    let me = &state.player_names[player];
    let partner_idx = state.partner_of(player);
    let partner = &state.player_names[partner_idx];
    let mut lines = Vec::new();
    if state.current_player == player {
        lines.push(format!("It is currently My ({me}) turn."));
    } else {
        lines.push(format!("It is currently {partner}'s turn."));
    }
    lines.push("Current Stacks:".to_string());
    lines.push(
        Color::ALL
            .iter()
            .map(|c| format!("{0} - {0} {1}", c.name(), state.stacks[c.index()]))
            .collect::<Vec<_>>()
            .join(", "),
    );
    lines.push("My cards based on my knowledge:".to_string());
    for (i, k) in state.knowledge[player].iter().enumerate() {
        lines.push(format!("Card {i} could be: {}", knowledge_sets(k)));
    }
    lines.push(format!("I can see {partner}'s Cards are:"));
    for (i, c) in state.hands[partner_idx].iter().enumerate() {
        lines.push(format!("[Card {i}: {c}]"));
    }
    lines.push(format!("{partner}'s Knowledge about his cards:"));
    for (i, k) in state.knowledge[partner_idx].iter().enumerate() {
        lines.push(format!(
            "{partner} believes his Card {i} could be: {}",
            knowledge_sets(k)
        ));
    }
    lines.push(format!("Remaining Reveal Tokens: {}", state.reveal_tokens));
    lines.push(format!("Remaining Lives: {}", state.lives));
    lines.push(format!("Deck Size: {}", state.deck.len()));
    let discards: Vec<String> = state.discard_pile.iter().map(|c| c.to_string()).collect();
    lines.push(format!("The discard pile is: [{}]", discards.join(", ")));
    lines.push(format!(
        "My Action History: [{}]",
        state.history[player].join(", ")
    ));
    lines.push("The next playable cards for each stack are:".to_string());
    for (c, next) in Color::ALL.iter().zip(next_playable(state)) {
        match next {
            None => lines.push(format!("{} Stack is Full.", c.name())),
            Some(r) => lines.push(format!("Only {0} {r} can be played on {0} Stack", c.name())),
        }
    }
    lines.join("\n")
}

pub fn describe_hanabi(state: &HanabiState, player: usize) -> String {
    let labels: Vec<String> = if state.current_player == player {
        state
            .legal_moves()
            .into_iter()
            .map(|m| state.move_label(m))
            .collect()
    } else {
        Vec::new()
    };
    format!(
        "{}\n\n{}",
        hanabi_body(state, player),
        action_block(GameKind::Hanabi, &labels)
    )
}

fn reach_sentence(station: &str, reach: Reach, blocker: &str) -> String {
    match reach {
        Reach::Away(d) => format!("{station} is {d} units away."),
        Reach::AwayBlocked(d) => format!("{station} is {d} units away blocked by {blocker}."),
        Reach::Blocked => format!("{station} is blocked by {blocker}."),
        Reach::Inaccessible => format!("{station} is inaccessible."),
    }
}

fn location_sentences(state: &KitchenState, player: usize) -> Vec<String> {
    let ranger = Ranger::new(state, player);
    let blocker = &state.player_names[KitchenState::partner_of(player)];
    [
        StationKind::Onion,
        StationKind::Plate,
        StationKind::Cooker,
        StationKind::Delivery,
        StationKind::Shared,
    ]
    .into_iter()
    .flat_map(|k| state.layout.station_ids(k))
    .map(|id| reach_sentence(&id.to_string(), ranger.reach(id), blocker))
    .collect()
}

/// Kitchen state from `player`'s seat, without the action block.
pub fn kitchen_body(state: &KitchenState, player: usize, flags: ObsFlags) -> String {
    let partner_idx = KitchenState::partner_of(player);
    let partner = &state.player_names[partner_idx];
    let holding = |p: usize| state.chefs[p].held.map_or("nothing", |i| i.held_name());

    let mut inventory = format!("<Inventory>: I am holding {}.", holding(player));
    if flags.include_partner_info {
        write!(inventory, " {partner} is holding {}.", holding(partner_idx)).expect("string write");
    }

    let mut mine = location_sentences(state, player);
    if let Some((k, d)) = closest_empty_counter(state, player) {
        mine.push(format!(
            "Closest empty kitchen counter {k} is {d} units away."
        ));
    }
    let mut sections = vec![
        inventory,
        format!("<My Location Information>: {}", mine.join(" ")),
    ];
    if flags.include_partner_info {
        sections.push(format!(
            "<{partner}'s Location Information>: {}",
            location_sentences(state, partner_idx).join(" ")
        ));
    }

    let mut env = Vec::new();
    for (i, c) in state.cookers.iter().enumerate() {
        env.push(format!("c{i} contains {} out of 3 onions.", c.onions));
        env.push(match c.status {
            CookerStatus::Off => format!("c{i} is off. soup in c{i} is not cooking."),
            CookerStatus::Cooking { .. } => format!("c{i} is on. soup in c{i} is still cooking."),
            CookerStatus::Cooked => format!("c{i} is off. soup in c{i} is cooked."),
        });
    }
    if state.shared.iter().any(Option::is_some) {
        for (i, s) in state.shared.iter().enumerate() {
            env.push(match s {
                Some(item) => format!("s{i} contains {}.", item.name()),
                None => format!("s{i} is empty."),
            });
        }
    }
    for (i, k) in state.counters.iter().enumerate() {
        if let Some(item) = k {
            env.push(format!("k{i} contains {}.", item.name()));
        }
    }
    sections.push(format!("<Environment Details>: {}", env.join(" ")));
    sections.join("\n\n")
}

pub fn describe_kitchen(state: &KitchenState, player: usize, flags: ObsFlags) -> String {
    let labels: Vec<String> = crate::kitchen::feasible_macros(state, player)
        .iter()
        .map(|m| m.label())
        .collect();
    format!(
        "{}\n\n{}",
        kitchen_body(state, player, flags),
        action_block(GameKind::Kitchen, &labels)
    )
}

fn door_sentences(map: &RoomGraph, door_open: &[bool]) -> Vec<String> {
    map.doors
        .iter()
        .zip(door_open)
        .filter(|(_, &open)| !open)
        .map(|(d, _)| format!("Door between Room {} and {} is closed.", d.a, d.b))
        .collect()
}

/// Room-graph state from `player`'s seat, without the action block.
pub fn pursuit_body(state: &PursuitState, player: usize, flags: ObsFlags) -> String {
    let me = &state.player_names[player];
    let partner_idx = (player + 1) % 2;
    let partner = &state.player_names[partner_idx];
    let mut first = vec![format!(
        "I ({me}) am in Room {}.",
        state.agent_rooms[player]
    )];
    if flags.include_partner_info {
        let room = state.agent_rooms[partner_idx];
        first.push(if state.escaped[partner_idx] {
            format!("{partner} has escaped.")
        } else if state.downed[partner_idx] {
            format!("{partner} is downed in Room {room}.")
        } else {
            format!("{partner} is in Room {room}.")
        });
    }
    first.push(format!(
        "{} is in Room {}.",
        state.mode.adversary_name(),
        state.adversary_room
    ));
    let mut lines = vec![first.join(" ")];

    let doors = door_sentences(&state.map, &state.door_open);
    if !doors.is_empty() {
        lines.push(doors.join(" "));
    }
    if let Some(toggles) = state.map.buttons.get(&state.agent_rooms[player]) {
        let doors: Vec<String> = toggles
            .iter()
            .map(|&i| {
                let d = state.map.doors[i];
                format!("the door between Room {} and {}", d.a, d.b)
            })
            .collect();
        lines.push(format!(
            "The button in my room toggles {}.",
            join_and(&doors)
        ));
    }
    if state.mode == PursuitMode::Escape {
        let mut parts = Vec::new();
        for (i, g) in state.map.generators.iter().enumerate() {
            parts.push(match state.fixes_remaining(i) {
                0 => format!("Generator in Room {} is fixed.", g.room),
                1 => format!("Generator in Room {} still needs 1 fix.", g.room),
                n => format!("Generator in Room {} still needs {n} fixes.", g.room),
            });
        }
        if state.map.gate.is_some() {
            parts.push(format!(
                "The exit gate is {}.",
                if state.gate_open { "open" } else { "closed" }
            ));
        }
        lines.push(parts.join(" "));
    }
    lines.join("\n")
}

pub fn describe_pursuit(state: &PursuitState, player: usize, flags: ObsFlags) -> String {
    let labels: Vec<String> = state
        .legal_moves(player)
        .iter()
        .map(|m| m.to_string())
        .collect();
    let game = match state.mode {
        PursuitMode::Capture => GameKind::Capture,
        PursuitMode::Escape => GameKind::Escape,
    };
    format!(
        "{}\n\n{}",
        pursuit_body(state, player, flags),
        action_block(game, &labels)
    )
}

/// Prompt for the partner-intent model.
pub fn tom_prompt(t: &Templates, game: GameKind, names: &[String], player: usize) -> String {
    let (me, partner) = me_partner(names, player);
    let (intro, rules, name) = match game {
        GameKind::Hanabi => (
            "The card game Hanabi has the following rules:",
            t.hanabi_rules.clone(),
            "the card game Hanabi",
        ),
        GameKind::Kitchen => (
            "The game Overcooked has the following rules:",
            t.kitchen_rules.clone(),
            "the game Overcooked",
        ),
        GameKind::Capture | GameKind::Escape => {
            let name = if game == GameKind::Capture {
                "the game Collab Capture"
            } else {
                "the game Collab Escape"
            };
            ("", game_description(game, names, player), name)
        }
    };
    let text = fill(
        &t.tom,
        &[
            ("game_intro", intro),
            ("rules", &rules),
            ("me", me),
            ("partner", partner),
            ("game_name", name),
        ],
    );
    text.trim_start().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(a: &str, b: &str) -> Vec<String> {
        vec![a.to_string(), b.to_string()]
    }

    #[test]
    fn hanabi_description_has_rules_and_format() {
        let d = game_description(GameKind::Hanabi, &names("Alice", "Bob"), 0);
        assert!(d.contains("three 1's, two 2's, two 3's, two 4's, one 5"));
        assert!(d.contains("I am Alice, playing the card game Hanabi with my partner Bob."));
        assert!(d.ends_with("Action:<selected move>. Do not say anything else. Got it?"));
    }

    #[test]
    fn kitchen_description_has_format() {
        let d = game_description(GameKind::Kitchen, &names("Alice", "Bob"), 1);
        assert!(d.contains("Format your response as: Action: <action>."));
        assert!(d.starts_with("I am Bob. I am playing the game Overcooked with my partner Alice."));
    }

    #[test]
    fn names_are_substituted_everywhere() {
        for g in GameKind::ALL {
            for p in 0..2 {
                let d = game_description(g, &names("Carol", "Dave"), p);
                assert!(!d.contains("Alice") && !d.contains("Bob"), "{g}");
                assert!(!d.contains('{'), "unfilled placeholder in {g}");
                let tom = tom_prompt(Templates::bundled(), g, &names("Carol", "Dave"), p);
                assert!(!tom.contains("Alice") && !tom.contains("Bob") && !tom.contains('{'));
            }
        }
    }

    #[test]
    fn lettered_blocks() {
        let labels = vec!["wait.".to_string(), "move away.".to_string()];
        assert_eq!(
            action_block(GameKind::Kitchen, &labels),
            "Available Actions: [wait., move away.]"
        );
        assert_eq!(
            action_block(GameKind::Capture, &labels),
            "Available Actions:\nA. wait.\nB. move away."
        );
    }

    #[test]
    fn template_overrides_fall_back_per_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("verifier.txt"), "Say okay.\n").unwrap();
        let t = Templates::load_dir(dir.path()).unwrap();
        assert_eq!(t.verifier, "Say okay.");
        assert_eq!(t.tom, Templates::bundled().tom);
    }

    #[test]
    fn fill_replaces_every_occurrence() {
        assert_eq!(
            fill("{a} and {a} but {b}", &[("a", "x")]),
            "x and x but {b}"
        );
    }
}
