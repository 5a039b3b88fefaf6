//! Macro actions: the named, high-level moves an agent chooses between,
//! their feasibility and distances, and their expansion into primitives.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::layout::{Direction, KitchenLayout, Pos, StationId, StationKind};
use super::state::{CookerStatus, Item, KitchenState, Primitive, ONIONS_PER_SOUP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MacroAction {
    PickUp { item: Item, from: StationId },
    PlaceIn { cooker: usize },
    PlaceOn { item: Item, on: StationId },
    Deliver { zone: usize },
    Wait,
    MoveAway,
}

impl MacroAction {
    pub fn label(&self) -> String {
        self.to_string()
    }

    pub fn target(&self) -> Option<StationId> {
        match *self {
            MacroAction::PickUp { from, .. } => Some(from),
            MacroAction::PlaceIn { cooker } => Some(StationId::new(StationKind::Cooker, cooker)),
            MacroAction::PlaceOn { on, .. } => Some(on),
            MacroAction::Deliver { zone } => Some(StationId::new(StationKind::Delivery, zone)),
            MacroAction::Wait | MacroAction::MoveAway => None,
        }
    }

    /// Parse a canonical label; the trailing period is optional.
    pub fn parse(label: &str) -> Option<MacroAction> {
        let text = label.trim().trim_end_matches('.');
        let words: Vec<&str> = text.split_whitespace().collect();
        let item = |w: &str| Item::ALL.into_iter().find(|i| i.name() == w);
        match words.as_slice() {
            ["wait"] => Some(MacroAction::Wait),
            ["move", "away"] => Some(MacroAction::MoveAway),
            ["pick", "up", it, "from", st] => Some(MacroAction::PickUp {
                item: item(it)?,
                from: StationId::parse(st)?,
            }),
            ["place", "onion", "in", st] => match StationId::parse(st)? {
                StationId {
                    kind: StationKind::Cooker,
                    index,
                } => Some(MacroAction::PlaceIn { cooker: index }),
                _ => None,
            },
            ["place", it, "on", st] => Some(MacroAction::PlaceOn {
                item: item(it)?,
                on: StationId::parse(st)?,
            }),
            ["deliver", "soup", "in", st] => match StationId::parse(st)? {
                StationId {
                    kind: StationKind::Delivery,
                    index,
                } => Some(MacroAction::Deliver { zone: index }),
                _ => None,
            },
            _ => None,
        }
    }
}

impl fmt::Display for MacroAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MacroAction::PickUp { item, from } => write!(f, "pick up {} from {from}.", item.name()),
            MacroAction::PlaceIn { cooker } => write!(f, "place onion in c{cooker}."),
            MacroAction::PlaceOn { item, on } => write!(f, "place {} on {on}.", item.name()),
            MacroAction::Deliver { zone } => write!(f, "deliver soup in d{zone}."),
            MacroAction::Wait => f.write_str("wait."),
            MacroAction::MoveAway => f.write_str("move away."),
        }
    }
}

/// How a chef relates to a station, distance-wise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reach {
    /// Shortest path is clear.
    Away(u32),
    /// The partner sits on every shortest path but a detour exists. Carries the unobstructed distance.
    AwayBlocked(u32),
    /// Only the partner's cell connects the chef to the station.
    Blocked,
    Inaccessible,
}

impl Reach {
    pub fn reachable(self) -> bool {
        matches!(self, Reach::Away(_) | Reach::AwayBlocked(_))
    }

    pub fn distance(self) -> Option<u32> {
        match self {
            Reach::Away(d) | Reach::AwayBlocked(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacroOption {
    pub action: MacroAction,
    pub feasible: bool,
    /// `None` for actions without a station target.
    pub reach: Option<Reach>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroundError {
    #[error("no path to {0}")]
    NoPath(StationId),
    #[error("unknown station {0}")]
    UnknownStation(StationId),
}

/// BFS step counts over floor cells from `from`, optionally treating `obstacle` as a wall.
pub fn distance_field(
    layout: &KitchenLayout,
    from: Pos,
    obstacle: Option<Pos>,
) -> Vec<Option<u32>> {
    let idx = |p: Pos| p.row * layout.width + p.col;
    let mut dist = vec![None; layout.width * layout.height];
    dist[idx(from)] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(p) = queue.pop_front() {
        let d = dist[idx(p)].unwrap_or(0);
        for dir in Direction::ALL {
            let Some(n) = layout.step(p, dir) else {
                continue;
            };
            if layout.is_floor(n) && Some(n) != obstacle && dist[idx(n)].is_none() {
                dist[idx(n)] = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

fn station_distance(layout: &KitchenLayout, field: &[Option<u32>], station: Pos) -> Option<u32> {
    layout
        .access_cells(station)
        .into_iter()
        .filter_map(|(c, _)| field[c.row * layout.width + c.col])
        .min()
}

/// Distance classifier for one chef. Computes the two BFS fields once.
pub struct Ranger<'a> {
    layout: &'a KitchenLayout,
    free: Vec<Option<u32>>,
    obstructed: Vec<Option<u32>>,
}

impl<'a> Ranger<'a> {
    pub fn new(state: &'a KitchenState, player: usize) -> Self {
        let layout = state.layout.as_ref();
        let me = state.chefs[player].pos;
        let partner = state.chefs[KitchenState::partner_of(player)].pos;
        Ranger {
            layout,
            free: distance_field(layout, me, None),
            obstructed: distance_field(layout, me, Some(partner)),
        }
    }

    pub fn reach(&self, station: StationId) -> Reach {
        let Some(pos) = self.layout.station_pos(station) else {
            return Reach::Inaccessible;
        };
        let free = station_distance(self.layout, &self.free, pos);
        let obstructed = station_distance(self.layout, &self.obstructed, pos);
        match (free, obstructed) {
            (None, _) => Reach::Inaccessible,
            (Some(_), None) => Reach::Blocked,
            (Some(f), Some(o)) if o > f => Reach::AwayBlocked(f),
            (Some(f), Some(_)) => Reach::Away(f),
        }
    }
}

pub fn reach(state: &KitchenState, player: usize, station: StationId) -> Reach {
    Ranger::new(state, player).reach(station)
}

/// The empty plain counter nearest to the chef, ties to the lower index.
pub fn closest_empty_counter(state: &KitchenState, player: usize) -> Option<(StationId, u32)> {
    let ranger = Ranger::new(state, player);
    closest_empty_with(state, &ranger)
}

fn closest_empty_with(state: &KitchenState, ranger: &Ranger<'_>) -> Option<(StationId, u32)> {
    state
        .layout
        .station_ids(StationKind::Counter)
        .filter(|&id| state.counter_item(id).is_none())
        .filter_map(|id| {
            let r = ranger.reach(id);
            r.reachable().then(|| (id, r.distance().unwrap_or(0)))
        })
        .min_by_key(|&(id, d)| (d, id.index))
}

/// Every grammatical macro for the layout, each tagged with feasibility and reach.
pub fn macro_actions(state: &KitchenState, player: usize) -> Vec<MacroOption> {
    let layout = state.layout.as_ref();
    let ranger = Ranger::new(state, player);
    let held = state.chefs[player].held;
    let closest_counter = closest_empty_with(state, &ranger).map(|(id, _)| id);
    let ids = |kind| layout.station_ids(kind).collect::<Vec<_>>();
    let counters: Vec<StationId> = ids(StationKind::Shared)
        .into_iter()
        .chain(ids(StationKind::Counter))
        .collect();

    let mut out = Vec::new();
    let mut push = |action: MacroAction, ok: bool| {
        let reach = action.target().map(|t| ranger.reach(t));
        let feasible = ok && reach.is_none_or(Reach::reachable);
        out.push(MacroOption {
            action,
            feasible,
            reach,
        });
    };

    for from in ids(StationKind::Onion) {
        push(
            MacroAction::PickUp {
                item: Item::Onion,
                from,
            },
            held.is_none(),
        );
    }
    for from in ids(StationKind::Plate) {
        push(
            MacroAction::PickUp {
                item: Item::Plate,
                from,
            },
            held.is_none(),
        );
    }
    for from in ids(StationKind::Cooker) {
        let cooked = state.cookers[from.index].status == CookerStatus::Cooked;
        push(
            MacroAction::PickUp {
                item: Item::Soup,
                from,
            },
            held == Some(Item::Plate) && cooked,
        );
    }
    for item in Item::ALL {
        for &from in &counters {
            let ok = held.is_none() && state.counter_item(from) == Some(item);
            push(MacroAction::PickUp { item, from }, ok);
        }
    }
    for c in ids(StationKind::Cooker) {
        let cooker = state.cookers[c.index];
        let ok = held == Some(Item::Onion)
            && cooker.status == CookerStatus::Off
            && cooker.onions < ONIONS_PER_SOUP;
        push(MacroAction::PlaceIn { cooker: c.index }, ok);
    }
    for item in Item::ALL {
        for &on in &counters {
            let free = state.counter_item(on).is_none();
            let offered = on.kind == StationKind::Shared || Some(on) == closest_counter;
            push(
                MacroAction::PlaceOn { item, on },
                held == Some(item) && free && offered,
            );
        }
    }
    for d in ids(StationKind::Delivery) {
        push(
            MacroAction::Deliver { zone: d.index },
            held == Some(Item::Soup),
        );
    }
    push(MacroAction::Wait, true);
    push(MacroAction::MoveAway, true);
    out
}

/// Feasible macros in grammar order.
pub fn feasible_macros(state: &KitchenState, player: usize) -> Vec<MacroAction> {
    macro_actions(state, player)
        .into_iter()
        .filter(|o| o.feasible)
        .map(|o| o.action)
        .collect()
}

/// Expand a macro into primitives: shortest path, a turn to face the station if needed, then interact.
pub fn ground(
    state: &KitchenState,
    player: usize,
    action: MacroAction,
) -> Result<Vec<Primitive>, GroundError> {
    let layout = state.layout.as_ref();
    let chef = &state.chefs[player];
    let partner = state.chefs[KitchenState::partner_of(player)].pos;
    let target = match action {
        MacroAction::Wait => return Ok(vec![Primitive::Stay]),
        MacroAction::MoveAway => return Ok(vec![move_away(state, player)]),
        other => other.target().expect("station macro"),
    };
    let station = layout
        .station_pos(target)
        .ok_or(GroundError::UnknownStation(target))?;
    let goals = layout.access_cells(station);

    let idx = |p: Pos| p.row * layout.width + p.col;
    let mut parent: Vec<Option<(Pos, Direction)>> = vec![None; layout.width * layout.height];
    let mut seen = vec![false; layout.width * layout.height];
    seen[idx(chef.pos)] = true;
    let mut queue = VecDeque::from([chef.pos]);
    let mut found = None;
    while let Some(p) = queue.pop_front() {
        if let Some(&(_, face)) = goals.iter().find(|(g, _)| *g == p) {
            found = Some((p, face));
            break;
        }
        for dir in Direction::ALL {
            let Some(n) = layout.step(p, dir) else {
                continue;
            };
            if layout.is_floor(n) && n != partner && !seen[idx(n)] {
                seen[idx(n)] = true;
                parent[idx(n)] = Some((p, dir));
                queue.push_back(n);
            }
        }
    }
    let (goal, face) = found.ok_or(GroundError::NoPath(target))?;

    let mut steps = Vec::new();
    let mut at = goal;
    while let Some((prev, dir)) = parent[idx(at)] {
        steps.push(dir);
        at = prev;
    }
    steps.reverse();
    let facing = steps.last().copied().unwrap_or(chef.facing);
    let mut plan: Vec<Primitive> = steps.into_iter().map(Primitive::from_direction).collect();
    if facing != face {
        plan.push(Primitive::from_direction(face));
    }
    plan.push(Primitive::Interact);
    Ok(plan)
}

/// One step off the current cell, preferring the neighbor farthest from the
/// partner. Stays only when boxed in.
fn move_away(state: &KitchenState, player: usize) -> Primitive {
    let layout = state.layout.as_ref();
    let me = state.chefs[player].pos;
    let partner = state.chefs[KitchenState::partner_of(player)].pos;
    let field = distance_field(layout, partner, None);
    let d = |p: Pos| field[p.row * layout.width + p.col].unwrap_or(u32::MAX);
    let mut best: Option<(u32, Direction)> = None;
    for dir in Direction::ALL {
        let Some(n) = layout.step(me, dir) else {
            continue;
        };
        if !layout.is_floor(n) || n == partner {
            continue;
        }
        let dn = d(n);
        if best.is_none_or(|(b, _)| dn > b) {
            best = Some((dn, dir));
        }
    }
    best.map_or(Primitive::Stay, |(_, dir)| Primitive::from_direction(dir))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kitchen::layout::parse_layout;
    use std::sync::Arc;

    fn state(grid: &str) -> KitchenState {
        KitchenState::new(
            Arc::new(parse_layout(grid).unwrap()),
            vec!["Alice".into(), "Bob".into()],
        )
    }

    #[test]
    fn labels_round_trip() {
        let actions = [
            MacroAction::PickUp {
                item: Item::Onion,
                from: StationId::parse("o1").unwrap(),
            },
            MacroAction::PickUp {
                item: Item::Soup,
                from: StationId::parse("c0").unwrap(),
            },
            MacroAction::PlaceIn { cooker: 1 },
            MacroAction::PlaceOn {
                item: Item::Plate,
                on: StationId::parse("k12").unwrap(),
            },
            MacroAction::Deliver { zone: 0 },
            MacroAction::Wait,
            MacroAction::MoveAway,
        ];
        for a in actions {
            assert_eq!(MacroAction::parse(&a.label()), Some(a), "{a}");
        }
        assert_eq!(
            MacroAction::parse("place onion in c0"),
            Some(MacroAction::PlaceIn { cooker: 0 })
        );
        assert_eq!(MacroAction::parse("place onion in s0."), None);
    }

    #[test]
    fn adjacent_and_facing_is_a_single_interact() {
        let mut s = state("XXOXX\nX1 2X\nXCXDX\nXXPXX");
        s.chefs[0].pos = Pos::new(1, 2);
        s.chefs[0].facing = Direction::Up;
        let a = MacroAction::PickUp {
            item: Item::Onion,
            from: StationId::parse("o0").unwrap(),
        };
        assert_eq!(ground(&s, 0, a).unwrap(), vec![Primitive::Interact]);
        assert_eq!(
            reach(&s, 0, StationId::parse("o0").unwrap()),
            Reach::Away(0)
        );
    }

    #[test]
    fn adjacent_but_turned_away_adds_a_turn() {
        let mut s = state("XXOXX\nX1 2X\nXCXDX\nXXPXX");
        s.chefs[0].pos = Pos::new(1, 2);
        s.chefs[0].facing = Direction::Down;
        let a = MacroAction::PickUp {
            item: Item::Onion,
            from: StationId::parse("o0").unwrap(),
        };
        assert_eq!(
            ground(&s, 0, a).unwrap(),
            vec![Primitive::Up, Primitive::Interact]
        );
    }

    #[test]
    fn holding_an_item_rules_out_pickups() {
        let mut s = state("XXOXX\nX1 2X\nXCXDX\nXXPXX");
        s.chefs[0].held = Some(Item::Onion);
        let legal = feasible_macros(&s, 0);
        assert!(legal
            .iter()
            .all(|a| !matches!(a, MacroAction::PickUp { .. })));
        assert!(legal.contains(&MacroAction::PlaceIn { cooker: 0 }));
    }

    #[test]
    fn partner_in_sole_corridor_blocks() {
        // Chef 0 at the west end, chef 1 in the one-cell neck, cooker beyond it.
        let mut s = state("XXXXXXX\nX1 2  C\nXOXXXXX\nXPDXXXX");
        s.chefs[0].held = Some(Item::Onion);
        let c0 = StationId::parse("c0").unwrap();
        assert_eq!(reach(&s, 0, c0), Reach::Blocked);
        let opt = macro_actions(&s, 0)
            .into_iter()
            .find(|o| o.action == MacroAction::PlaceIn { cooker: 0 })
            .unwrap();
        assert!(!opt.feasible);
        assert_eq!(ground(&s, 0, opt.action), Err(GroundError::NoPath(c0)));
    }

    #[test]
    fn detour_reports_unobstructed_distance() {
        let s = state("XXXXXX\nX1 2 C\nX    X\nXOPDXX");
        // Chef 1 stands between chef 0 and the cooker; the row below is a detour.
        let r = reach(&s, 0, StationId::parse("c0").unwrap());
        assert_eq!(r, Reach::AwayBlocked(3));
    }

    #[test]
    fn only_nearest_empty_counter_is_offered() {
        let mut s = state("XXXXX\nX1 2X\nXOCDX\nXXPXX");
        s.chefs[0].held = Some(Item::Onion);
        let places: Vec<_> = feasible_macros(&s, 0)
            .into_iter()
            .filter(|a| matches!(a, MacroAction::PlaceOn { .. }))
            .collect();
        assert_eq!(places.len(), 1);
        let (k, d) = closest_empty_counter(&s, 0).unwrap();
        assert_eq!(
            places[0],
            MacroAction::PlaceOn {
                item: Item::Onion,
                on: k
            }
        );
        assert_eq!(d, 0);
    }

    #[test]
    fn move_away_steps_off() {
        let s = state("XXXXXX\nX12  X\nXOCDPX\nXXXXXX");
        assert_eq!(
            ground(&s, 1, MacroAction::MoveAway).unwrap(),
            vec![Primitive::Right]
        );
        // Chef 0 is cornered against the wall.
        assert_eq!(
            ground(&s, 0, MacroAction::MoveAway).unwrap(),
            vec![Primitive::Stay]
        );
        assert_eq!(
            ground(&s, 0, MacroAction::Wait).unwrap(),
            vec![Primitive::Stay]
        );
    }
}
