//! Kitchen world state and the per-tick transition.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::layout::{Direction, KitchenLayout, Pos, StationId, StationKind};

/// Ticks a full cooker needs before the soup is ready.
pub const COOK_TIME: u32 = 20;
/// Points per delivered soup.
pub const DELIVERY_REWARD: u32 = 20;
pub const ONIONS_PER_SOUP: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Item {
    Onion,
    Plate,
    Soup,
}

impl Item {
    pub const ALL: [Item; 3] = [Item::Onion, Item::Plate, Item::Soup];

    pub fn name(self) -> &'static str {
        match self {
            Item::Onion => "onion",
            Item::Plate => "plate",
            Item::Soup => "soup",
        }
    }

    /// Wording used in inventories.
    pub fn held_name(self) -> &'static str {
        match self {
            Item::Soup => "cooked soup",
            other => other.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Primitive {
    Up,
    Down,
    Left,
    Right,
    Interact,
    Stay,
}

impl Primitive {
    pub fn direction(self) -> Option<Direction> {
        match self {
            Primitive::Up => Some(Direction::Up),
            Primitive::Down => Some(Direction::Down),
            Primitive::Left => Some(Direction::Left),
            Primitive::Right => Some(Direction::Right),
            _ => None,
        }
    }

    pub fn from_direction(d: Direction) -> Primitive {
        match d {
            Direction::Up => Primitive::Up,
            Direction::Down => Primitive::Down,
            Direction::Left => Primitive::Left,
            Direction::Right => Primitive::Right,
        }
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Primitive::Up => "up",
            Primitive::Down => "down",
            Primitive::Left => "left",
            Primitive::Right => "right",
            Primitive::Interact => "interact",
            Primitive::Stay => "stay",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chef {
    pub pos: Pos,
    pub facing: Direction,
    pub held: Option<Item>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CookerStatus {
    Off,
    Cooking { remaining: u32 },
    Cooked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cooker {
    pub onions: u8,
    pub status: CookerStatus,
}

impl Default for Cooker {
    fn default() -> Self {
        Cooker {
            onions: 0,
            status: CookerStatus::Off,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KitchenState {
    pub layout: Arc<KitchenLayout>,
    pub player_names: Vec<String>,
    pub chefs: [Chef; 2],
    pub cookers: Vec<Cooker>,
    /// Contents of the shared counters, by index.
    pub shared: Vec<Option<Item>>,
    /// Contents of the plain counters, by index.
    pub counters: Vec<Option<Item>>,
    pub tick: u32,
    pub score: u32,
    pub delivered: u32,
}

impl KitchenState {
    pub fn new(layout: Arc<KitchenLayout>, player_names: Vec<String>) -> Self {
        let chef = |p: Pos| Chef {
            pos: p,
            facing: Direction::Up,
            held: None,
        };
        KitchenState {
            chefs: [chef(layout.spawn[0]), chef(layout.spawn[1])],
            cookers: vec![Cooker::default(); layout.stations(StationKind::Cooker).len()],
            shared: vec![None; layout.stations(StationKind::Shared).len()],
            counters: vec![None; layout.stations(StationKind::Counter).len()],
            layout,
            player_names,
            tick: 0,
            score: 0,
            delivered: 0,
        }
    }

    pub fn partner_of(player: usize) -> usize {
        1 - player
    }

    /// Item resting on a counter station, if the station is a counter.
    pub fn counter_item(&self, id: StationId) -> Option<Item> {
        match id.kind {
            StationKind::Shared => self.shared.get(id.index).copied().flatten(),
            StationKind::Counter => self.counters.get(id.index).copied().flatten(),
            _ => None,
        }
    }

    fn counter_slot(&mut self, id: StationId) -> Option<&mut Option<Item>> {
        match id.kind {
            StationKind::Shared => self.shared.get_mut(id.index),
            StationKind::Counter => self.counters.get_mut(id.index),
            _ => None,
        }
    }

    /// Station the chef is facing, if any.
    pub fn faced_station(&self, player: usize) -> Option<StationId> {
        let chef = &self.chefs[player];
        let target = self.layout.step(chef.pos, chef.facing)?;
        self.layout.station_at(target)
    }

    /// Loose items on counters plus held items, by kind.
    pub fn item_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        let all = self
            .shared
            .iter()
            .chain(&self.counters)
            .copied()
            .chain(self.chefs.iter().map(|c| c.held));
        for item in all.flatten() {
            counts[item as usize] += 1;
        }
        counts
    }

    fn interact(&mut self, player: usize) {
        let Some(station) = self.faced_station(player) else {
            return;
        };
        let held = self.chefs[player].held;
        match (station.kind, held) {
            (StationKind::Onion, None) => self.chefs[player].held = Some(Item::Onion),
            (StationKind::Plate, None) => self.chefs[player].held = Some(Item::Plate),
            (StationKind::Cooker, Some(Item::Onion)) => {
                let cooker = &mut self.cookers[station.index];
                if cooker.status == CookerStatus::Off && cooker.onions < ONIONS_PER_SOUP {
                    cooker.onions += 1;
                    if cooker.onions == ONIONS_PER_SOUP {
                        cooker.status = CookerStatus::Cooking {
                            remaining: COOK_TIME,
                        };
                    }
                    self.chefs[player].held = None;
                }
            }
            (StationKind::Cooker, Some(Item::Plate)) => {
                let cooker = &mut self.cookers[station.index];
                if cooker.status == CookerStatus::Cooked {
                    *cooker = Cooker::default();
                    self.chefs[player].held = Some(Item::Soup);
                }
            }
            (StationKind::Delivery, Some(Item::Soup)) => {
                self.chefs[player].held = None;
                self.score += DELIVERY_REWARD;
                self.delivered += 1;
            }
            (StationKind::Shared | StationKind::Counter, _) => {
                let slot = self.counter_slot(station).expect("counter exists");
                match (held, *slot) {
                    (Some(item), None) => {
                        *slot = Some(item);
                        self.chefs[player].held = None;
                    }
                    (None, Some(item)) => {
                        *slot = None;
                        self.chefs[player].held = Some(item);
                    }
                    _ => {}
                }
            }
            _ => {}
        }
    }

    /// Advance one tick. Interactions resolve first in player order, then
    /// movement happens simultaneously, then running cookers count down.
    pub fn tick(&mut self, moves: [Primitive; 2]) {
        let was_cooking: Vec<bool> = self
            .cookers
            .iter()
            .map(|c| matches!(c.status, CookerStatus::Cooking { .. }))
            .collect();

        for (player, mv) in moves.iter().enumerate() {
            if *mv == Primitive::Interact {
                self.interact(player);
            }
        }

        let mut proposed = [self.chefs[0].pos, self.chefs[1].pos];
        for (player, mv) in moves.iter().enumerate() {
            if let Some(dir) = mv.direction() {
                self.chefs[player].facing = dir;
                if let Some(next) = self.layout.step(self.chefs[player].pos, dir) {
                    if self.layout.is_floor(next) {
                        proposed[player] = next;
                    }
                }
            }
        }
        let current = [self.chefs[0].pos, self.chefs[1].pos];
        let same_cell = proposed[0] == proposed[1];
        let swap = proposed[0] == current[1] && proposed[1] == current[0];
        if !same_cell && !swap {
            self.chefs[0].pos = proposed[0];
            self.chefs[1].pos = proposed[1];
        }

        for (cooker, was) in self.cookers.iter_mut().zip(was_cooking) {
            if let (CookerStatus::Cooking { remaining }, true) = (cooker.status, was) {
                cooker.status = if remaining <= 1 {
                    CookerStatus::Cooked
                } else {
                    CookerStatus::Cooking {
                        remaining: remaining - 1,
                    }
                };
            }
        }
        self.tick += 1;
    }
}

/// Value-semantics transition.
pub fn tick(state: &KitchenState, moves: [Primitive; 2]) -> KitchenState {
    let mut next = state.clone();
    next.tick(moves);
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kitchen::layout::parse_layout;

    fn state(grid: &str) -> KitchenState {
        KitchenState::new(
            Arc::new(parse_layout(grid).unwrap()),
            vec!["Alice".into(), "Bob".into()],
        )
    }

    const CORRIDOR: &str = "XXOXX\nX1 2X\nXCXDX\nXXPXX";

    #[test]
    fn same_cell_collision_keeps_both() {
        let mut s = state(CORRIDOR);
        s.tick([Primitive::Right, Primitive::Left]);
        assert_eq!(s.chefs[0].pos, Pos::new(1, 1));
        assert_eq!(s.chefs[1].pos, Pos::new(1, 3));
        assert_eq!(s.chefs[0].facing, Direction::Right);
    }

    #[test]
    fn swap_collision_keeps_both() {
        let mut s = state("XXXX\nX12X\nXOCX\nXDPX");
        s.tick([Primitive::Right, Primitive::Left]);
        assert_eq!(s.chefs[0].pos, Pos::new(1, 1));
        assert_eq!(s.chefs[1].pos, Pos::new(1, 2));
    }

    #[test]
    fn following_into_vacated_cell_is_allowed() {
        let mut s = state("XXXXX\nX12 X\nXOCDX\nXXPXX");
        s.tick([Primitive::Right, Primitive::Right]);
        assert_eq!(s.chefs[0].pos, Pos::new(1, 2));
        assert_eq!(s.chefs[1].pos, Pos::new(1, 3));
    }

    #[test]
    fn cooker_runs_exactly_twenty_ticks() {
        let mut s = state(CORRIDOR);
        s.chefs[0].facing = Direction::Down;
        for _ in 0..3 {
            s.chefs[0].held = Some(Item::Onion);
            s.tick([Primitive::Interact, Primitive::Stay]);
        }
        assert_eq!(
            s.cookers[0].status,
            CookerStatus::Cooking {
                remaining: COOK_TIME
            }
        );
        for _ in 0..COOK_TIME - 1 {
            s.tick([Primitive::Stay, Primitive::Stay]);
            assert!(matches!(s.cookers[0].status, CookerStatus::Cooking { .. }));
        }
        s.tick([Primitive::Stay, Primitive::Stay]);
        assert_eq!(s.cookers[0].status, CookerStatus::Cooked);
    }

    #[test]
    fn full_cooker_rejects_onions() {
        let mut s = state(CORRIDOR);
        s.chefs[0].facing = Direction::Down;
        s.cookers[0] = Cooker {
            onions: 3,
            status: CookerStatus::Cooked,
        };
        s.chefs[0].held = Some(Item::Onion);
        s.tick([Primitive::Interact, Primitive::Stay]);
        assert_eq!(s.chefs[0].held, Some(Item::Onion));
        assert_eq!(s.cookers[0].onions, 3);
    }

    #[test]
    fn plate_collects_soup_and_delivery_scores() {
        let mut s = state(CORRIDOR);
        s.cookers[0].status = CookerStatus::Cooked;
        s.cookers[0].onions = 3;
        s.chefs[0].facing = Direction::Down;
        s.chefs[0].held = Some(Item::Plate);
        s.tick([Primitive::Interact, Primitive::Stay]);
        assert_eq!(s.chefs[0].held, Some(Item::Soup));
        assert_eq!(s.cookers[0], Cooker::default());

        s.chefs[1].facing = Direction::Down;
        s.chefs[1].held = Some(Item::Soup);
        s.tick([Primitive::Stay, Primitive::Interact]);
        assert_eq!(s.score, DELIVERY_REWARD);
        assert_eq!(s.chefs[1].held, None);
    }

    #[test]
    fn counters_swap_items_with_hands() {
        let mut s = state("XXSXX\nX1 2X\nXCODX\nXXPXX");
        s.chefs[0].held = Some(Item::Onion);
        s.tick([Primitive::Right, Primitive::Stay]);
        s.tick([Primitive::Up, Primitive::Stay]);
        s.tick([Primitive::Interact, Primitive::Stay]);
        assert_eq!(s.shared[0], Some(Item::Onion));
        assert_eq!(s.chefs[0].held, None);
        s.tick([Primitive::Interact, Primitive::Stay]);
        assert_eq!(s.chefs[0].held, Some(Item::Onion));
    }

    #[test]
    fn interacting_with_nothing_is_a_no_op() {
        let mut s = state(CORRIDOR);
        let before = s.clone();
        s.chefs[0].facing = Direction::Left;
        s.tick([Primitive::Interact, Primitive::Interact]);
        assert_eq!(s.chefs[0].held, before.chefs[0].held);
        assert_eq!(s.tick, 1);
    }
}
