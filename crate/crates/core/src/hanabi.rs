//! Two-player Hanabi with per-card knowledge tracking.
//!
//! The deck top is the last element of `deck`. New cards join a hand on the
//! right; removing a card shifts everything to its right one slot left, and
//! the knowledge list moves in lockstep.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{ActionId, GameKind};
use crate::rng::{make_rng, Seed};

pub const HAND_SIZE: usize = 5;
pub const MAX_TOKENS: u8 = 8;
pub const MAX_LIVES: u8 = 3;
pub const DECK_SIZE: usize = 50;
/// Copies of each rank per color: three 1s, two 2s, two 3s, two 4s, one 5.
pub const RANK_COUNTS: [u8; 5] = [3, 2, 2, 2, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Red,
    Yellow,
    Green,
    White,
    Blue,
}

impl Color {
    pub const ALL: [Color; 5] = [
        Color::Red,
        Color::Yellow,
        Color::Green,
        Color::White,
        Color::Blue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "Red",
            Color::Yellow => "Yellow",
            Color::Green => "Green",
            Color::White => "White",
            Color::Blue => "Blue",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    fn bit(self) -> u8 {
        1 << self.index()
    }

    pub fn from_name(name: &str) -> Option<Color> {
        Color::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(name))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Card {
    pub color: Color,
    pub rank: u8,
}

impl Card {
    pub fn new(color: Color, rank: u8) -> Self {
        debug_assert!((1..=5).contains(&rank));
        Card { color, rank }
    }
}

impl std::fmt::Display for Card {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", self.color.name(), self.rank)
    }
}

/// What a player can deduce about one of their own cards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "KnowledgeRepr", try_from = "KnowledgeRepr")]
pub struct CardKnowledge {
    colors: u8,
    ranks: u8,
}

#[derive(Serialize, Deserialize)]
struct KnowledgeRepr {
    colors: Vec<Color>,
    ranks: Vec<u8>,
}

impl From<CardKnowledge> for KnowledgeRepr {
    fn from(k: CardKnowledge) -> Self {
        KnowledgeRepr {
            colors: k.colors().collect(),
            ranks: k.ranks().collect(),
        }
    }
}

impl TryFrom<KnowledgeRepr> for CardKnowledge {
    type Error = String;

    fn try_from(r: KnowledgeRepr) -> Result<Self, Self::Error> {
        if r.ranks.iter().any(|x| !(1..=5).contains(x)) {
            return Err("rank out of range".into());
        }
        let k = CardKnowledge::from_sets(&r.colors, &r.ranks);
        if k.colors == 0 || k.ranks == 0 {
            return Err("knowledge sets must be nonempty".into());
        }
        Ok(k)
    }
}

impl Default for CardKnowledge {
    fn default() -> Self {
        Self::unknown()
    }
}

impl CardKnowledge {
    pub fn unknown() -> Self {
        CardKnowledge {
            colors: 0b1_1111,
            ranks: 0b1_1111,
        }
    }

    pub fn from_sets(colors: &[Color], ranks: &[u8]) -> Self {
        CardKnowledge {
            colors: colors.iter().fold(0, |m, c| m | c.bit()),
            ranks: ranks.iter().fold(0, |m, r| m | (1 << (r - 1))),
        }
    }

    pub fn colors(&self) -> impl Iterator<Item = Color> + '_ {
        Color::ALL
            .into_iter()
            .filter(move |c| self.colors & c.bit() != 0)
    }

    pub fn ranks(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=5u8).filter(move |r| self.ranks & (1 << (r - 1)) != 0)
    }

    pub fn may_be(&self, card: Card) -> bool {
        self.colors & card.color.bit() != 0 && self.ranks & (1 << (card.rank - 1)) != 0
    }

    pub fn color_known(&self) -> Option<Color> {
        let mut it = self.colors();
        match (it.next(), it.next()) {
            (Some(c), None) => Some(c),
            _ => None,
        }
    }

    pub fn rank_known(&self) -> Option<u8> {
        let mut it = self.ranks();
        match (it.next(), it.next()) {
            (Some(r), None) => Some(r),
            _ => None,
        }
    }

    /// True when no clue has narrowed either set.
    pub fn is_unclued(&self) -> bool {
        *self == Self::unknown()
    }

    /// Every (color, rank) the holder still considers possible is playable now.
    pub fn surely_playable(&self, stacks: &[u8; 5]) -> bool {
        self.colors()
            .all(|c| self.ranks().all(|r| stacks[c.index()] + 1 == r))
    }

    /// Every possibility is already on its stack.
    pub fn surely_useless(&self, stacks: &[u8; 5]) -> bool {
        self.colors()
            .all(|c| self.ranks().all(|r| r <= stacks[c.index()]))
    }

    fn apply_clue(&mut self, clue: Clue, touched: bool) {
        match (clue, touched) {
            (Clue::Color(c), true) => self.colors = c.bit(),
            (Clue::Color(c), false) => self.colors &= !c.bit(),
            (Clue::Rank(r), true) => self.ranks = 1 << (r - 1),
            (Clue::Rank(r), false) => self.ranks &= !(1 << (r - 1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Clue {
    Color(Color),
    Rank(u8),
}

impl Clue {
    pub fn touches(self, card: Card) -> bool {
        match self {
            Clue::Color(c) => card.color == c,
            Clue::Rank(r) => card.rank == r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HanabiMove {
    Reveal(Clue),
    Play(usize),
    Discard(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct HanabiRules {
    /// Standard rules forbid discarding while holding every reveal token.
    pub allow_discard_at_max_tokens: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HanabiState {
    pub player_names: Vec<String>,
    pub deck: Vec<Card>,
    pub hands: Vec<Vec<Card>>,
    pub knowledge: Vec<Vec<CardKnowledge>>,
    pub stacks: [u8; 5],
    pub discard_pile: Vec<Card>,
    pub reveal_tokens: u8,
    pub lives: u8,
    pub current_player: usize,
    pub final_turns_remaining: Option<u8>,
    pub turn: u32,
    /// Per-player log of own moves in the wording used by the state description.
    pub history: Vec<Vec<String>>,
    #[serde(default)]
    pub rules: HanabiRules,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Played {
        card: Card,
        success: bool,
        drew: Option<Card>,
    },
    Discarded {
        card: Card,
        drew: Option<Card>,
    },
    Revealed {
        clue: Clue,
        touched: Vec<usize>,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HanabiError {
    #[error("the game is over")]
    TerminalState,
    #[error("illegal action: {0}")]
    IllegalAction(String),
}

pub fn full_deck() -> Vec<Card> {
    let mut deck = Vec::with_capacity(DECK_SIZE);
    for color in Color::ALL {
        for (i, &n) in RANK_COUNTS.iter().enumerate() {
            for _ in 0..n {
                deck.push(Card::new(color, i as u8 + 1));
            }
        }
    }
    deck
}

pub fn default_names() -> Vec<String> {
    vec!["Alice".to_string(), "Bob".to_string()]
}

/// Shuffle a fresh deck with the seeded generator and deal five cards to each player.
pub fn deal(seed: Seed) -> HanabiState {
    deal_with(seed, default_names(), HanabiRules::default())
}

pub fn deal_with(seed: Seed, player_names: Vec<String>, rules: HanabiRules) -> HanabiState {
    let players = player_names.len();
    let mut deck = full_deck();
    make_rng(seed).shuffle(&mut deck);
    let mut hands = vec![Vec::with_capacity(HAND_SIZE); players];
    for hand in hands.iter_mut() {
        for _ in 0..HAND_SIZE {
            hand.push(deck.pop().expect("deck holds enough cards"));
        }
    }
    HanabiState {
        player_names,
        deck,
        knowledge: vec![vec![CardKnowledge::unknown(); HAND_SIZE]; players],
        hands,
        stacks: [0; 5],
        discard_pile: Vec::new(),
        reveal_tokens: MAX_TOKENS,
        lives: MAX_LIVES,
        current_player: 0,
        final_turns_remaining: None,
        turn: 0,
        history: vec![Vec::new(); players],
        rules,
    }
}

impl HanabiState {
    pub fn player_count(&self) -> usize {
        self.hands.len()
    }

    pub fn partner_of(&self, player: usize) -> usize {
        (player + 1) % self.player_count()
    }

    pub fn is_terminal(&self) -> bool {
        self.lives == 0
            || self.stacks.iter().all(|&s| s == 5)
            || self.final_turns_remaining == Some(0)
    }

    pub fn score(&self) -> u32 {
        score(self)
    }

    /// Cards accounted for across deck, hands, discard pile and stacks.
    pub fn card_total(&self) -> usize {
        self.deck.len()
            + self.hands.iter().map(Vec::len).sum::<usize>()
            + self.discard_pile.len()
            + self.stacks.iter().map(|&s| s as usize).sum::<usize>()
    }

    pub fn legal_moves(&self) -> Vec<HanabiMove> {
        if self.is_terminal() {
            return Vec::new();
        }
        let me = self.current_player;
        let partner_hand = &self.hands[self.partner_of(me)];
        let mut moves = Vec::new();
        if self.reveal_tokens > 0 {
            for color in Color::ALL {
                if partner_hand.iter().any(|c| c.color == color) {
                    moves.push(HanabiMove::Reveal(Clue::Color(color)));
                }
            }
            for rank in 1..=5 {
                if partner_hand.iter().any(|c| c.rank == rank) {
                    moves.push(HanabiMove::Reveal(Clue::Rank(rank)));
                }
            }
        }
        let held = self.hands[me].len();
        moves.extend((0..held).map(HanabiMove::Play));
        if self.reveal_tokens < MAX_TOKENS || self.rules.allow_discard_at_max_tokens {
            moves.extend((0..held).map(HanabiMove::Discard));
        }
        moves
    }

    /// Available-action wording, e.g. "Reveal Bob's Green color cards".
    pub fn move_label(&self, mv: HanabiMove) -> String {
        let partner = &self.player_names[self.partner_of(self.current_player)];
        match mv {
            HanabiMove::Reveal(Clue::Color(c)) => {
                format!("Reveal {partner}'s {} color cards", c.name())
            }
            HanabiMove::Reveal(Clue::Rank(r)) => format!("Reveal {partner}'s rank {r} cards"),
            HanabiMove::Play(i) => format!("Play my Card {i}"),
            HanabiMove::Discard(i) => format!("Discard my Card {i}"),
        }
    }

    /// Action-history wording, e.g. "Reveal Bob's Rank 3 Cards".
    fn history_label(&self, mv: HanabiMove) -> String {
        let partner = &self.player_names[self.partner_of(self.current_player)];
        match mv {
            HanabiMove::Reveal(Clue::Color(c)) => {
                format!("Reveal {partner}'s {} Color Cards", c.name())
            }
            HanabiMove::Reveal(Clue::Rank(r)) => format!("Reveal {partner}'s Rank {r} Cards"),
            HanabiMove::Play(i) => format!("Play Card {i}"),
            HanabiMove::Discard(i) => format!("Discard Card {i}"),
        }
    }

    pub fn legal_actions(&self) -> Result<Vec<ActionId>, HanabiError> {
        legal_actions(self)
    }

    /// Resolve an [`ActionId`] against the current legal list.
    pub fn resolve(&self, action: &ActionId) -> Result<HanabiMove, HanabiError> {
        let moves = self.legal_moves();
        match moves.get(action.index) {
            Some(&mv) if action.game == GameKind::Hanabi && self.move_label(mv) == action.label => {
                Ok(mv)
            }
            _ => moves
                .into_iter()
                .find(|&mv| self.move_label(mv) == action.label)
                .ok_or_else(|| HanabiError::IllegalAction(action.label.clone())),
        }
    }

    pub fn apply(&mut self, action: &ActionId) -> Result<Outcome, HanabiError> {
        if self.is_terminal() {
            return Err(HanabiError::TerminalState);
        }
        let mv = self.resolve(action)?;
        Ok(self.apply_move(mv))
    }

    /// Apply a move known to be legal.
    pub fn apply_move(&mut self, mv: HanabiMove) -> Outcome {
        debug_assert!(self.legal_moves().contains(&mv), "illegal move {mv:?}");
        let me = self.current_player;
        let label = self.history_label(mv);
        let counting_down = self.final_turns_remaining.is_some();
        let mut drew_last = false;

        let outcome = match mv {
            HanabiMove::Reveal(clue) => {
                let partner = self.partner_of(me);
                self.reveal_tokens -= 1;
                let mut touched = Vec::new();
                for (i, card) in self.hands[partner].iter().enumerate() {
                    let hit = clue.touches(*card);
                    if hit {
                        touched.push(i);
                    }
                    self.knowledge[partner][i].apply_clue(clue, hit);
                }
                Outcome::Revealed { clue, touched }
            }
            HanabiMove::Play(i) => {
                let card = self.remove_card(me, i);
                let stack = &mut self.stacks[card.color.index()];
                let success = *stack + 1 == card.rank;
                if success {
                    *stack += 1;
                    if card.rank == 5 {
                        self.reveal_tokens = (self.reveal_tokens + 1).min(MAX_TOKENS);
                    }
                } else {
                    self.discard_pile.push(card);
                    self.lives -= 1;
                }
                let drew = self.draw(me, &mut drew_last);
                Outcome::Played {
                    card,
                    success,
                    drew,
                }
            }
            HanabiMove::Discard(i) => {
                let card = self.remove_card(me, i);
                self.discard_pile.push(card);
                self.reveal_tokens = (self.reveal_tokens + 1).min(MAX_TOKENS);
                let drew = self.draw(me, &mut drew_last);
                Outcome::Discarded { card, drew }
            }
        };

        self.history[me].push(label);
        if counting_down {
            if let Some(n) = self.final_turns_remaining.as_mut() {
                *n = n.saturating_sub(1);
            }
        } else if drew_last {
            self.final_turns_remaining = Some(self.player_count() as u8);
        }
        self.turn += 1;
        self.current_player = self.partner_of(me);
        outcome
    }

    fn remove_card(&mut self, player: usize, index: usize) -> Card {
        self.knowledge[player].remove(index);
        self.hands[player].remove(index)
    }

    fn draw(&mut self, player: usize, drew_last: &mut bool) -> Option<Card> {
        let card = self.deck.pop()?;
        self.hands[player].push(card);
        self.knowledge[player].push(CardKnowledge::unknown());
        *drew_last = self.deck.is_empty();
        Some(card)
    }
}

pub fn legal_actions(state: &HanabiState) -> Result<Vec<ActionId>, HanabiError> {
    if state.is_terminal() {
        return Err(HanabiError::TerminalState);
    }
    Ok(state
        .legal_moves()
        .into_iter()
        .enumerate()
        .map(|(index, mv)| ActionId {
            game: GameKind::Hanabi,
            index,
            label: state.move_label(mv),
        })
        .collect())
}

/// Value-semantics transition.
pub fn apply_action(
    state: &HanabiState,
    action: &ActionId,
) -> Result<(HanabiState, Outcome), HanabiError> {
    let mut next = state.clone();
    let outcome = next.apply(action)?;
    Ok((next, outcome))
}

pub fn score(state: &HanabiState) -> u32 {
    if state.lives == 0 {
        0
    } else {
        state.stacks.iter().map(|&s| s as u32).sum()
    }
}

/// Next rank each stack accepts; `None` once the stack is full.
pub fn next_playable(state: &HanabiState) -> [Option<u8>; 5] {
    state
        .stacks
        .map(|s| if s >= 5 { None } else { Some(s + 1) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state_with_hands(me: Vec<Card>, partner: Vec<Card>) -> HanabiState {
        let mut s = deal(Seed(0));
        let mut deck = full_deck();
        for c in me.iter().chain(partner.iter()) {
            // Hands may hold more copies than exist; only pull what the deck has.
            if let Some(pos) = deck.iter().position(|d| d == c) {
                deck.remove(pos);
            }
        }
        s.knowledge = vec![
            vec![CardKnowledge::unknown(); me.len()],
            vec![CardKnowledge::unknown(); partner.len()],
        ];
        s.hands = vec![me, partner];
        s.deck = deck;
        s
    }

    fn act(s: &HanabiState, label: &str) -> ActionId {
        s.legal_actions()
            .unwrap()
            .into_iter()
            .find(|a| a.label == label)
            .unwrap_or_else(|| panic!("{label} not legal"))
    }

    #[test]
    fn deal_sets_up_counts() {
        let s = deal(Seed(5));
        assert_eq!(s.deck.len(), 40);
        assert_eq!(s.reveal_tokens, 8);
        assert_eq!(s.lives, 3);
        assert_eq!(s.card_total(), 50);
        assert!(s.knowledge.iter().flatten().all(|k| k.is_unclued()));
    }

    #[test]
    fn deal_is_deterministic() {
        assert_eq!(deal(Seed(42)).hands, deal(Seed(42)).hands);
        assert_ne!(deal(Seed(42)).hands, deal(Seed(43)).hands);
    }

    #[test]
    fn no_reveals_without_tokens() {
        let mut s = deal(Seed(1));
        s.reveal_tokens = 0;
        let labels: Vec<_> = s
            .legal_actions()
            .unwrap()
            .into_iter()
            .map(|a| a.label)
            .collect();
        assert!(labels.iter().all(|l| !l.starts_with("Reveal")));
        assert_eq!(labels.len(), 10);
    }

    #[test]
    fn no_discards_at_full_tokens() {
        let s = deal(Seed(1));
        assert!(s
            .legal_moves()
            .iter()
            .all(|m| !matches!(m, HanabiMove::Discard(_))));
        let mut relaxed = s.clone();
        relaxed.rules.allow_discard_at_max_tokens = true;
        assert_eq!(
            relaxed
                .legal_moves()
                .iter()
                .filter(|m| matches!(m, HanabiMove::Discard(_)))
                .count(),
            5
        );
    }

    #[test]
    fn single_color_partner_hand_gives_one_color_reveal() {
        use Color::*;
        let s = state_with_hands(
            vec![Card::new(Red, 1); 5],
            vec![
                Card::new(Green, 1),
                Card::new(Green, 2),
                Card::new(Green, 3),
                Card::new(Green, 4),
                Card::new(Green, 5),
            ],
        );
        let colors: Vec<_> = s
            .legal_moves()
            .into_iter()
            .filter(|m| matches!(m, HanabiMove::Reveal(Clue::Color(_))))
            .collect();
        assert_eq!(colors, vec![HanabiMove::Reveal(Clue::Color(Green))]);
    }

    #[test]
    fn playing_next_card_grows_stack() {
        use Color::*;
        let mut s = state_with_hands(
            vec![
                Card::new(Red, 1),
                Card::new(Blue, 2),
                Card::new(Blue, 3),
                Card::new(Blue, 4),
                Card::new(Blue, 5),
            ],
            vec![
                Card::new(Green, 1),
                Card::new(Green, 2),
                Card::new(Green, 3),
                Card::new(Green, 4),
                Card::new(Green, 5),
            ],
        );
        let out = s.apply(&act(&s, "Play my Card 0")).unwrap();
        assert!(matches!(out, Outcome::Played { success: true, .. }));
        assert_eq!(s.stacks[Red.index()], 1);
        assert_eq!(s.lives, 3);
        assert_eq!(s.current_player, 1);
        assert_eq!(s.history[0], vec!["Play Card 0".to_string()]);
        assert_eq!(s.card_total(), 50);
    }

    #[test]
    fn misplay_costs_a_life() {
        use Color::*;
        let mut s = state_with_hands(
            vec![
                Card::new(Red, 2),
                Card::new(Blue, 2),
                Card::new(Blue, 3),
                Card::new(Blue, 4),
                Card::new(Blue, 5),
            ],
            vec![Card::new(Green, 1); 5],
        );
        s.apply(&act(&s, "Play my Card 0")).unwrap();
        assert_eq!(s.lives, 2);
        assert_eq!(s.discard_pile, vec![Card::new(Red, 2)]);
    }

    #[test]
    fn completing_a_stack_returns_a_token() {
        use Color::*;
        let mut s = state_with_hands(
            vec![
                Card::new(White, 5),
                Card::new(Blue, 2),
                Card::new(Blue, 3),
                Card::new(Blue, 4),
                Card::new(Blue, 1),
            ],
            vec![Card::new(Green, 1); 5],
        );
        s.stacks[White.index()] = 4;
        s.reveal_tokens = 7;
        // Remove the white 1-4 from the deck so the count still adds up.
        for r in 1..=4 {
            let pos = s
                .deck
                .iter()
                .position(|c| *c == Card::new(White, r))
                .unwrap();
            s.deck.remove(pos);
        }
        s.apply(&act(&s, "Play my Card 0")).unwrap();
        assert_eq!(s.reveal_tokens, 8);
        assert_eq!(s.stacks[White.index()], 5);
    }

    #[test]
    fn rank_clue_prunes_touched_and_untouched() {
        use Color::*;
        let mut s = state_with_hands(
            vec![Card::new(Red, 5); 5],
            vec![
                Card::new(Red, 1),
                Card::new(Blue, 1),
                Card::new(Green, 2),
                Card::new(White, 3),
                Card::new(Yellow, 4),
            ],
        );
        s.apply(&act(&s, "Reveal Bob's rank 1 cards")).unwrap();
        let k = &s.knowledge[1];
        assert_eq!(k[0].ranks().collect::<Vec<_>>(), vec![1]);
        assert_eq!(k[1].ranks().collect::<Vec<_>>(), vec![1]);
        for card in &k[2..] {
            assert_eq!(card.ranks().collect::<Vec<_>>(), vec![2, 3, 4, 5]);
            assert_eq!(card.colors().count(), 5);
        }
        assert_eq!(s.reveal_tokens, 7);
    }

    #[test]
    fn scoring_rules() {
        let mut s = deal(Seed(0));
        s.stacks = [5, 4, 1, 1, 3];
        assert_eq!(score(&s), 14);
        s.lives = 0;
        assert_eq!(score(&s), 0);
        s.lives = 1;
        s.stacks = [5; 5];
        assert_eq!(score(&s), 25);
        assert!(s.is_terminal());
    }

    #[test]
    fn next_playable_marks_full_stacks() {
        let mut s = deal(Seed(0));
        assert_eq!(next_playable(&s), [Some(1); 5]);
        s.stacks = [5, 0, 0, 0, 3];
        let np = next_playable(&s);
        assert_eq!(np[Color::Red.index()], None);
        assert_eq!(np[Color::Blue.index()], Some(4));
    }

    #[test]
    fn final_round_gives_each_player_one_turn() {
        let mut s = deal(Seed(9));
        s.reveal_tokens = 0;
        // Leave a single card in the deck.
        while s.deck.len() > 1 {
            let c = s.deck.remove(0);
            s.discard_pile.push(c);
        }
        s.apply_move(HanabiMove::Play(0));
        if s.lives == 0 {
            return;
        }
        assert_eq!(s.final_turns_remaining, Some(2));
        assert!(!s.is_terminal());
        s.reveal_tokens = 0;
        s.apply_move(HanabiMove::Discard(0));
        assert_eq!(s.final_turns_remaining, Some(1));
        assert!(!s.is_terminal());
        s.apply_move(HanabiMove::Discard(0));
        assert!(s.is_terminal());
        assert_eq!(s.legal_actions(), Err(HanabiError::TerminalState));
    }

    #[test]
    fn stale_label_is_rejected() {
        let s = deal(Seed(0));
        let bogus = ActionId {
            game: GameKind::Hanabi,
            index: 0,
            label: "Play my Card 9".into(),
        };
        assert!(matches!(
            apply_action(&s, &bogus),
            Err(HanabiError::IllegalAction(_))
        ));
    }

    #[test]
    fn knowledge_serializes_as_sets() {
        let k = CardKnowledge::from_sets(&[Color::Red, Color::Blue], &[2, 3]);
        let json = serde_json::to_string(&k).unwrap();
        assert_eq!(json, r#"{"colors":["Red","Blue"],"ranks":[2,3]}"#);
        assert_eq!(serde_json::from_str::<CardKnowledge>(&json).unwrap(), k);
    }
}
