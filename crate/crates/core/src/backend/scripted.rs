//! Deterministic hand-written policies used as baselines and test partners.
//!
//! | policy         | game    | rule                                                                 |
//! |----------------|---------|----------------------------------------------------------------------|
//! | greedy-kitchen | kitchen | nearest useful station: onion, cooker, plate, soup, delivery          |
//! | rule-hanabi    | hanabi  | play known-playable, else play clue, save clue, else discard oldest   |
//! | oracle-hanabi  | hanabi  | reads its own hand; never misplays (debug only)                       |
//! | greedy-pursuit | pursuit | capture: shortest joint plan to corner; escape: generators then gate  |
//! | random-legal   | any     | uniform over the legal list from a seeded generator                   |
//!
//! Ties always go to the earliest entry of the legal list.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::game::{Agent, Decision, DecisionView, StateRef};
use crate::hanabi::{CardKnowledge, Clue, Color, HanabiMove, HanabiState, MAX_TOKENS, RANK_COUNTS};
use crate::kitchen::macros::Ranger;
use crate::kitchen::{CookerStatus, Item, KitchenState, MacroAction, Reach, StationKind};
use crate::pursuit::{PursuitMode, PursuitMove, PursuitState, RoomId};
use crate::rng::{make_rng, Pcg32, Seed};

use crate::agent::AgentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScriptedPolicy {
    GreedyKitchen,
    RuleHanabi,
    OracleHanabi,
    GreedyPursuit,
    RandomLegal,
}

impl ScriptedPolicy {
    pub const ALL: [ScriptedPolicy; 5] = [
        ScriptedPolicy::GreedyKitchen,
        ScriptedPolicy::RuleHanabi,
        ScriptedPolicy::OracleHanabi,
        ScriptedPolicy::GreedyPursuit,
        ScriptedPolicy::RandomLegal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScriptedPolicy::GreedyKitchen => "greedy-kitchen",
            ScriptedPolicy::RuleHanabi => "rule-hanabi",
            ScriptedPolicy::OracleHanabi => "oracle-hanabi",
            ScriptedPolicy::GreedyPursuit => "greedy-pursuit",
            ScriptedPolicy::RandomLegal => "random-legal",
        }
    }
}

impl fmt::Display for ScriptedPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScriptedPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScriptedPolicy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown scripted policy {s:?}"))
    }
}

/// A scripted policy seated as an agent. Decisions report zero latency.
pub struct ScriptedAgent {
    policy: ScriptedPolicy,
    seed: Seed,
    rng: Pcg32,
    plan: Option<JointPlan>,
}

impl ScriptedAgent {
    pub fn new(policy: ScriptedPolicy, seed: Seed) -> Self {
        ScriptedAgent {
            policy,
            seed,
            rng: make_rng(seed),
            plan: None,
        }
    }

    pub fn policy(&self) -> ScriptedPolicy {
        self.policy
    }
}

impl Agent for ScriptedAgent {
    fn name(&self) -> String {
        self.policy.name().to_string()
    }

    fn decide(&mut self, view: &DecisionView<'_>) -> Result<Decision, AgentError> {
        if view.legal.is_empty() {
            return Err(AgentError::NoLegalActions);
        }
        let labels: Vec<&str> = view.legal.iter().map(|a| a.label.as_str()).collect();
        let wanted = match (self.policy, view.state) {
            (ScriptedPolicy::RandomLegal, _) => None,
            (ScriptedPolicy::RuleHanabi, StateRef::Hanabi(s)) => Some(s.move_label(rule_hanabi(s))),
            (ScriptedPolicy::OracleHanabi, StateRef::Hanabi(s)) => {
                Some(s.move_label(oracle_hanabi(s)))
            }
            (ScriptedPolicy::GreedyKitchen, StateRef::Kitchen(s)) => {
                greedy_kitchen(s, view.player, &labels).map(|m| m.label())
            }
            (ScriptedPolicy::GreedyPursuit, StateRef::Pursuit(s)) => {
                Some(greedy_pursuit(s, view.player, &mut self.plan).to_string())
            }
            (policy, _) => {
                return Err(AgentError::Unsupported(format!(
                    "{policy} cannot play {}",
                    view.game
                )));
            }
        };
        let index = match wanted {
            Some(label) => labels.iter().position(|l| *l == label).unwrap_or(0),
            None => self.rng.index(labels.len()),
        };
        Ok(Decision::pick(index))
    }

    fn reset(&mut self) {
        self.rng = make_rng(self.seed);
        self.plan = None;
    }
}

// ---------------------------------------------------------------- hanabi

fn copies(rank: u8) -> u8 {
    RANK_COUNTS[rank as usize - 1]
}

fn card_slot(color: Color, rank: u8) -> usize {
    color.index() * 5 + rank as usize - 1
}

/// Copies of each card identity that `player` can see outside their own hand.
fn visible_counts(state: &HanabiState, player: usize) -> [u8; 25] {
    let mut seen = [0u8; 25];
    for c in &state.discard_pile {
        seen[card_slot(c.color, c.rank)] += 1;
    }
    for color in Color::ALL {
        for r in 1..=state.stacks[color.index()] {
            seen[card_slot(color, r)] += 1;
        }
    }
    for c in &state.hands[state.partner_of(player)] {
        seen[card_slot(c.color, c.rank)] += 1;
    }
    seen
}

/// Identities still possible for a card once fully accounted copies are removed.
fn candidates(k: &CardKnowledge, seen: &[u8; 25]) -> Vec<(Color, u8)> {
    let mut out = Vec::new();
    for c in k.colors() {
        for r in k.ranks() {
            if seen[card_slot(c, r)] < copies(r) {
                out.push((c, r));
            }
        }
    }
    out
}

fn is_playable(stacks: &[u8; 5], color: Color, rank: u8) -> bool {
    stacks[color.index()] + 1 == rank
}

fn clues_for(state: &HanabiState) -> Vec<Clue> {
    state
        .legal_moves()
        .into_iter()
        .filter_map(|m| match m {
            HanabiMove::Reveal(c) => Some(c),
            _ => None,
        })
        .collect()
}

/// Knowledge the partner would hold after `clue`.
fn after_clue(state: &HanabiState, clue: Clue) -> Vec<CardKnowledge> {
    let mut next = state.clone();
    next.apply_move(HanabiMove::Reveal(clue));
    next.knowledge[state.partner_of(state.current_player)].clone()
}

fn play_clue(state: &HanabiState) -> Option<Clue> {
    let partner = state.partner_of(state.current_player);
    let hand = &state.hands[partner];
    let before = &state.knowledge[partner];
    let mut best: Option<(usize, Clue)> = None;
    for clue in clues_for(state) {
        let after = after_clue(state, clue);
        let mut gained = Vec::new();
        for (i, k) in after.iter().enumerate() {
            if k.surely_playable(&state.stacks)
                && !before[i].surely_playable(&state.stacks)
                && !gained.contains(&hand[i])
            {
                gained.push(hand[i]);
            }
        }
        if !gained.is_empty() && best.is_none_or(|(n, _)| gained.len() > n) {
            best = Some((gained.len(), clue));
        }
    }
    best.map(|(_, c)| c)
}

/// The partner's oldest unclued card, the one they would discard next.
fn chop(knowledge: &[CardKnowledge]) -> Option<usize> {
    knowledge.iter().position(CardKnowledge::is_unclued)
}

fn save_clue(state: &HanabiState) -> Option<Clue> {
    let partner = state.partner_of(state.current_player);
    let i = chop(&state.knowledge[partner])?;
    let card = state.hands[partner][i];
    if card.rank <= state.stacks[card.color.index()]
        || is_playable(&state.stacks, card.color, card.rank)
    {
        return None;
    }
    let discarded = state.discard_pile.iter().filter(|c| **c == card).count() as u8;
    let critical = card.rank == 5 || discarded + 1 == copies(card.rank);
    if !critical {
        return None;
    }
    let clues = clues_for(state);
    [Clue::Rank(card.rank), Clue::Color(card.color)]
        .into_iter()
        .find(|c| clues.contains(c))
}

/// A clue adding information about an actually playable card.
fn progress_clue(state: &HanabiState) -> Option<Clue> {
    let partner = state.partner_of(state.current_player);
    let hand = &state.hands[partner];
    let before = &state.knowledge[partner];
    clues_for(state).into_iter().find(|&clue| {
        let after = after_clue(state, clue);
        hand.iter().enumerate().any(|(i, card)| {
            clue.touches(*card)
                && is_playable(&state.stacks, card.color, card.rank)
                && after[i] != before[i]
        }) && hand
            .iter()
            .all(|card| !clue.touches(*card) || card.rank > state.stacks[card.color.index()])
    })
}

/// Play what is surely playable, clue what the partner can play, protect
/// critical cards, and otherwise discard the oldest unclued card.
pub fn rule_hanabi(state: &HanabiState) -> HanabiMove {
    let me = state.current_player;
    let seen = visible_counts(state, me);
    let mine = &state.knowledge[me];
    let cands: Vec<Vec<(Color, u8)>> = mine.iter().map(|k| candidates(k, &seen)).collect();

    if let Some(i) = cands
        .iter()
        .position(|c| !c.is_empty() && c.iter().all(|&(col, r)| is_playable(&state.stacks, col, r)))
    {
        return HanabiMove::Play(i);
    }
    if state.reveal_tokens > 0 {
        if let Some(c) = play_clue(state).or_else(|| save_clue(state)) {
            return HanabiMove::Reveal(c);
        }
        if state.reveal_tokens >= 3 {
            if let Some(c) = progress_clue(state) {
                return HanabiMove::Reveal(c);
            }
        }
    }
    if state.reveal_tokens < MAX_TOKENS || state.rules.allow_discard_at_max_tokens {
        let useless = cands
            .iter()
            .position(|c| c.iter().all(|&(col, r)| r <= state.stacks[col.index()]));
        return HanabiMove::Discard(useless.or_else(|| chop(mine)).unwrap_or(0));
    }
    // Holding every token: any clue that says something new.
    let partner = state.partner_of(me);
    let clues = clues_for(state);
    let informative = clues
        .iter()
        .copied()
        .find(|&c| after_clue(state, c) != state.knowledge[partner]);
    HanabiMove::Reveal(
        informative
            .or(clues.first().copied())
            .expect("a reveal is legal at max tokens"),
    )
}

/// Debug policy that reads its own cards.
pub fn oracle_hanabi(state: &HanabiState) -> HanabiMove {
    let me = state.current_player;
    let hand = &state.hands[me];
    let stacks = &state.stacks;
    if let Some(i) = (1..=5u8).find_map(|rank| {
        hand.iter()
            .position(|c| c.rank == rank && is_playable(stacks, c.color, c.rank))
    }) {
        return HanabiMove::Play(i);
    }
    let can_discard = state.reveal_tokens < MAX_TOKENS || state.rules.allow_discard_at_max_tokens;
    let partner_hand = &state.hands[state.partner_of(me)];
    let useless = |i: usize| {
        let c = hand[i];
        c.rank <= stacks[c.color.index()] || hand[..i].contains(&c) || partner_hand.contains(&c)
    };
    if can_discard {
        if let Some(i) = (0..hand.len()).find(|&i| useless(i)) {
            return HanabiMove::Discard(i);
        }
    }
    if state.reveal_tokens > 0 {
        if let Some(c) = clues_for(state).first() {
            return HanabiMove::Reveal(*c);
        }
    }
    // Forced to throw something away: keep the last copies, give up the highest rank.
    let critical = |c: &crate::hanabi::Card| {
        let gone = state.discard_pile.iter().filter(|d| *d == c).count() as u8;
        gone + 1 >= copies(c.rank)
    };
    let pick = (0..hand.len())
        .filter(|&i| !critical(&hand[i]))
        .max_by_key(|&i| (hand[i].rank, std::cmp::Reverse(i)))
        .unwrap_or(0);
    HanabiMove::Discard(pick)
}

// ---------------------------------------------------------------- kitchen

fn parse_options(labels: &[&str]) -> Vec<MacroAction> {
    labels
        .iter()
        .filter_map(|l| MacroAction::parse(l))
        .collect()
}

/// Nearest-useful-station heuristic for one chef.
pub fn greedy_kitchen(state: &KitchenState, player: usize, labels: &[&str]) -> Option<MacroAction> {
    let options = parse_options(labels);
    let ranger = Ranger::new(state, player);
    let dist = |m: &MacroAction| {
        m.target()
            .map(|t| ranger.reach(t).distance().unwrap_or(u32::MAX))
            .unwrap_or(0)
    };
    let nearest = |pred: &dyn Fn(&MacroAction) -> bool| {
        options
            .iter()
            .filter(|m| pred(m))
            .min_by_key(|m| dist(m))
            .copied()
    };
    let partner = &state.chefs[1 - player];
    let any_cooked = state
        .cookers
        .iter()
        .any(|c| c.status == CookerStatus::Cooked);
    let any_cooking = state
        .cookers
        .iter()
        .any(|c| matches!(c.status, CookerStatus::Cooking { .. }));
    // Onions still missing from idle cookers, minus the one the partner carries.
    let missing: usize = state
        .cookers
        .iter()
        .filter(|c| c.status == CookerStatus::Off)
        .map(|c| 3 - c.onions as usize)
        .sum();
    let loose = |item: Item| {
        state
            .shared
            .iter()
            .chain(&state.counters)
            .filter(|c| **c == Some(item))
            .count()
    };
    let missing =
        missing.saturating_sub(usize::from(partner.held == Some(Item::Onion)) + loose(Item::Onion));
    let reaches_cooker = state
        .layout
        .station_ids(StationKind::Cooker)
        .any(|c| ranger.reach(c) != Reach::Inaccessible);
    let on_shared = |m: &MacroAction| matches!(m, MacroAction::PlaceOn { on, .. } if on.kind == StationKind::Shared);
    let on_any = |m: &MacroAction| matches!(m, MacroAction::PlaceOn { .. });

    let choice = match state.chefs[player].held {
        Some(Item::Soup) => {
            nearest(&|m| matches!(m, MacroAction::Deliver { .. })).or_else(|| nearest(&on_shared))
        }
        // Fill the fullest cooker first so both chefs finish the same soup.
        Some(Item::Onion) => options
            .iter()
            .filter_map(|m| match m {
                MacroAction::PlaceIn { cooker } => Some((*m, state.cookers[*cooker].onions)),
                _ => None,
            })
            .min_by_key(|(m, onions)| (std::cmp::Reverse(*onions), dist(m)))
            .map(|(m, _)| m)
            .or_else(|| nearest(&on_shared))
            .or_else(|| if missing == 0 { nearest(&on_any) } else { None }),
        Some(Item::Plate) => nearest(&|m| {
            matches!(
                m,
                MacroAction::PickUp {
                    item: Item::Soup,
                    ..
                }
            )
        })
        .or_else(|| {
            if reaches_cooker && (any_cooking || any_cooked) {
                None
            } else {
                nearest(&on_shared)
            }
        }),
        None => {
            let partner_has_plate =
                matches!(partner.held, Some(Item::Plate | Item::Soup)) || loose(Item::Plate) > 0;
            // Take from a counter only what this chef can put to use.
            let usable = |m: &MacroAction, item: Item| match m {
                MacroAction::PickUp { item: i, from } if *i == item => {
                    !from.kind.is_counter() || reaches_cooker
                }
                _ => false,
            };
            let soup = nearest(&|m| {
                matches!(
                    m,
                    MacroAction::PickUp {
                        item: Item::Soup,
                        ..
                    }
                )
            });
            let plate = nearest(&|m| usable(m, Item::Plate)).filter(|m| {
                !partner_has_plate
                    || matches!(m, MacroAction::PickUp { from, .. } if from.kind.is_counter())
            });
            let onion = nearest(&|m| usable(m, Item::Onion));
            soup.or(if any_cooked { plate } else { None })
                .or(
                    if missing > 0 || (reaches_cooker && loose(Item::Onion) > 0) {
                        onion
                    } else {
                        None
                    },
                )
                .or(if any_cooking { plate } else { None })
        }
    };
    if choice.is_some() {
        return choice;
    }
    // Idle. Step aside if standing where the partner needs to be.
    let partner_ranger = Ranger::new(state, 1 - player);
    let blocking = [
        StationKind::Onion,
        StationKind::Plate,
        StationKind::Cooker,
        StationKind::Delivery,
    ]
    .into_iter()
    .flat_map(|k| state.layout.station_ids(k))
    .any(|t| partner_ranger.reach(t) == Reach::Blocked);
    let want = if blocking {
        MacroAction::MoveAway
    } else {
        MacroAction::Wait
    };
    options.contains(&want).then_some(want)
}

// ---------------------------------------------------------------- pursuit

/// Joint winning plan shared by both seats: each seat computes the same
/// search from the same state and plays its own half.
#[derive(Debug, Clone)]
pub struct JointPlan {
    expected: Vec<(Key, [Option<PursuitMove>; 2])>,
    cursor: usize,
}

type Key = (
    [RoomId; 2],
    RoomId,
    Vec<bool>,
    Vec<u32>,
    [bool; 2],
    [bool; 2],
);

fn key(s: &PursuitState) -> Key {
    (
        s.agent_rooms,
        s.adversary_room,
        s.door_open.clone(),
        s.fixes_done.clone(),
        s.downed,
        s.escaped,
    )
}

// Inactive seats contribute `None`.
fn seat_moves(s: &PursuitState, p: usize) -> Vec<Option<PursuitMove>> {
    if s.active(p) {
        s.legal_moves(p).into_iter().map(Some).collect()
    } else {
        vec![None]
    }
}

fn joint_moves(s: &PursuitState) -> Vec<[Option<PursuitMove>; 2]> {
    let a = seat_moves(s, 0);
    let b = seat_moves(s, 1);
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in &a {
        for &y in &b {
            out.push([x, y]);
        }
    }
    out
}

/// Breadth-first search over joint moves for the fewest rounds to a win.
fn search_win(start: &PursuitState) -> Option<JointPlan> {
    let horizon = start.turn_limit.saturating_sub(start.turn);
    let mut parent: HashMap<Key, Option<(Key, [Option<PursuitMove>; 2])>> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut probe = start.clone();
    probe.history = [Vec::new(), Vec::new()];
    parent.insert(key(&probe), None);
    queue.push_back((probe, 0u32));
    while let Some((s, depth)) = queue.pop_front() {
        if depth >= horizon {
            continue;
        }
        for mv in joint_moves(&s) {
            let mut next = s.clone();
            if next.step(mv).is_err() {
                continue;
            }
            next.history = [Vec::new(), Vec::new()];
            let k = key(&next);
            if parent.contains_key(&k) {
                continue;
            }
            parent.insert(k.clone(), Some((key(&s), mv)));
            if next.won() {
                let mut steps = Vec::new();
                let mut cur = k;
                while let Some(Some((prev, mv))) = parent.get(&cur).cloned() {
                    steps.push((prev.clone(), mv));
                    cur = prev;
                }
                steps.reverse();
                return Some(JointPlan {
                    expected: steps,
                    cursor: 0,
                });
            }
            queue.push_back((next, depth + 1));
        }
    }
    None
}

/// Fewest rounds until the agents win from `s`, if they can within the turn limit.
pub fn rounds_to_win(s: &PursuitState) -> Option<usize> {
    if s.won() {
        return Some(0);
    }
    search_win(s).map(|p| p.expected.len())
}

fn step_toward(s: &PursuitState, from: RoomId, to: RoomId) -> Option<RoomId> {
    let dist = s.map.distances(&[to], &s.door_open);
    let d = *dist.get(&from)?;
    if d == 0 {
        return None;
    }
    s.map
        .open_neighbors(from, &s.door_open)
        .into_iter()
        .find(|r| dist.get(r) == Some(&(d - 1)))
}

/// Follow the shortest joint winning line when one exists within the turn
/// limit; otherwise chase (capture) or fix while keeping clear of the killer.
pub fn greedy_pursuit(
    s: &PursuitState,
    player: usize,
    plan: &mut Option<JointPlan>,
) -> PursuitMove {
    let legal = s.legal_moves(player);
    let current = key(s);
    let on_plan = plan
        .as_ref()
        .is_some_and(|p| p.expected.get(p.cursor).is_some_and(|(k, _)| *k == current));
    if !on_plan {
        *plan = search_win(s);
    }
    if let Some(p) = plan.as_mut() {
        if let Some((k, mv)) = p.expected.get(p.cursor) {
            if let Some(m) = mv[player].filter(|m| *k == current && legal.contains(m)) {
                p.cursor += 1;
                return m;
            }
        }
    }
    let here = s.agent_rooms[player];
    match s.mode {
        PursuitMode::Capture => step_toward(s, here, s.adversary_room)
            .map(PursuitMove::MoveTo)
            .filter(|m| legal.contains(m))
            .unwrap_or(PursuitMove::Stay),
        PursuitMode::Escape => {
            let killer = s.map.distances(&[s.adversary_room], &s.door_open);
            let threat = |r: RoomId| killer.get(&r).copied().unwrap_or(u32::MAX);
            if threat(here) <= 1 {
                // Flee to the room farthest from the killer.
                return legal
                    .iter()
                    .filter_map(|m| match m {
                        PursuitMove::MoveTo(r) => Some((threat(*r), *r)),
                        _ => None,
                    })
                    .min_by_key(|&(d, r)| (std::cmp::Reverse(d), r))
                    .map_or(PursuitMove::Stay, |(_, r)| PursuitMove::MoveTo(r));
            }
            if legal.contains(&PursuitMove::Exit) {
                return PursuitMove::Exit;
            }
            if legal.contains(&PursuitMove::Fix) {
                return PursuitMove::Fix;
            }
            let goal = if s.gate_open {
                s.map.gate
            } else {
                let dist = s.map.distances(&[here], &s.door_open);
                let mut ranked: Vec<(u32, RoomId)> = s
                    .map
                    .generators
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| s.fixes_remaining(*i) > 0)
                    .filter_map(|(_, g)| dist.get(&g.room).map(|d| (*d, g.room)))
                    .collect();
                ranked.sort_unstable();
                // Seats split up when more than one generator is left.
                ranked
                    .get(player.min(ranked.len().saturating_sub(1)))
                    .map(|(_, r)| *r)
            };
            goal.and_then(|g| step_toward(s, here, g))
                .filter(|r| threat(*r) > 1)
                .map(PursuitMove::MoveTo)
                .filter(|m| legal.contains(m))
                .unwrap_or(PursuitMove::Stay)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hanabi::{deal, Card};

    #[test]
    fn policy_names_round_trip() {
        for p in ScriptedPolicy::ALL {
            assert_eq!(p.name().parse::<ScriptedPolicy>().unwrap(), p);
        }
    }

    #[test]
    fn rule_hanabi_plays_known_red_one() {
        let mut s = deal(Seed(3));
        s.hands[0][2] = Card::new(Color::Red, 1);
        s.knowledge[0][2] = CardKnowledge::from_sets(&[Color::Red], &[1]);
        assert_eq!(rule_hanabi(&s), HanabiMove::Play(2));
    }

    #[test]
    fn oracle_plays_only_playable_cards() {
        let mut s = deal(Seed(11));
        s.hands[0] = vec![
            Card::new(Color::Blue, 3),
            Card::new(Color::Green, 1),
            Card::new(Color::Red, 2),
            Card::new(Color::Red, 4),
            Card::new(Color::White, 5),
        ];
        assert_eq!(oracle_hanabi(&s), HanabiMove::Play(1));
    }
}
