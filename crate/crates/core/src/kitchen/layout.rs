//! Kitchen layout files.
//!
//! A layout is a rectangular character grid:
//!
//! | char | meaning                         | label |
//! |------|---------------------------------|-------|
//! | `X`  | kitchen counter                 | `kN`  |
//! | `O`  | onion dispenser                 | `oN`  |
//! | `P`  | plate dispenser                 | `pN`  |
//! | `C`  | cooker                          | `cN`  |
//! | `D`  | delivery zone                   | `dN`  |
//! | `S`  | shared counter                  | `sN`  |
//! | `#`  | plain wall, never interactable  |       |
//! | ` `  | floor                           |       |
//! | `1`  | floor, spawn of the first chef  |       |
//! | `2`  | floor, spawn of the second chef |       |
//!
//! Stations of each kind are numbered from 0 in row-major order.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub row: usize,
    pub col: usize,
}

impl Pos {
    pub fn new(row: usize, col: usize) -> Self {
        Pos { row, col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    /// BFS expansion and tie-break order.
    pub const ALL: [Direction; 4] = [
        Direction::Up,
        Direction::Down,
        Direction::Left,
        Direction::Right,
    ];

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StationKind {
    Onion,
    Plate,
    Cooker,
    Delivery,
    Shared,
    Counter,
}

impl StationKind {
    pub const ALL: [StationKind; 6] = [
        StationKind::Onion,
        StationKind::Plate,
        StationKind::Cooker,
        StationKind::Delivery,
        StationKind::Shared,
        StationKind::Counter,
    ];

    pub fn prefix(self) -> char {
        match self {
            StationKind::Onion => 'o',
            StationKind::Plate => 'p',
            StationKind::Cooker => 'c',
            StationKind::Delivery => 'd',
            StationKind::Shared => 's',
            StationKind::Counter => 'k',
        }
    }

    fn from_char(ch: char) -> Option<StationKind> {
        Some(match ch {
            'O' => StationKind::Onion,
            'P' => StationKind::Plate,
            'C' => StationKind::Cooker,
            'D' => StationKind::Delivery,
            'S' => StationKind::Shared,
            'X' => StationKind::Counter,
            _ => return None,
        })
    }

    fn to_char(self) -> char {
        match self {
            StationKind::Onion => 'O',
            StationKind::Plate => 'P',
            StationKind::Cooker => 'C',
            StationKind::Delivery => 'D',
            StationKind::Shared => 'S',
            StationKind::Counter => 'X',
        }
    }

    /// Counters that can hold a loose item.
    pub fn is_counter(self) -> bool {
        matches!(self, StationKind::Shared | StationKind::Counter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StationId {
    pub kind: StationKind,
    pub index: usize,
}

impl StationId {
    pub fn new(kind: StationKind, index: usize) -> Self {
        StationId { kind, index }
    }

    pub fn parse(label: &str) -> Option<StationId> {
        let mut chars = label.chars();
        let prefix = chars.next()?;
        let kind = StationKind::ALL
            .into_iter()
            .find(|k| k.prefix() == prefix)?;
        let index = chars.as_str().parse().ok()?;
        Some(StationId { kind, index })
    }
}

impl fmt::Display for StationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    Floor,
    Wall,
    Station(StationId),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("malformed grid: {0}")]
    MalformedGrid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayoutWarning {
    /// Neither chef can stand next to this station.
    UnreachableStation(StationId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "LayoutRepr", try_from = "LayoutRepr")]
pub struct KitchenLayout {
    pub name: String,
    pub width: usize,
    pub height: usize,
    cells: Vec<Cell>,
    stations: Vec<Vec<Pos>>,
    pub spawn: [Pos; 2],
    /// Per station (indexed like `stations`), whether each chef's spawn region reaches it.
    accessible: Vec<Vec<[bool; 2]>>,
    pub warnings: Vec<LayoutWarning>,
}

#[derive(Serialize, Deserialize)]
struct LayoutRepr {
    name: String,
    grid: Vec<String>,
}

impl From<KitchenLayout> for LayoutRepr {
    fn from(l: KitchenLayout) -> Self {
        LayoutRepr {
            grid: l.to_text().lines().map(str::to_string).collect(),
            name: l.name,
        }
    }
}

impl TryFrom<LayoutRepr> for KitchenLayout {
    type Error = LayoutError;

    fn try_from(r: LayoutRepr) -> Result<Self, Self::Error> {
        parse_layout_named(&r.name, &r.grid.join("\n"))
    }
}

pub fn parse_layout(text: &str) -> Result<KitchenLayout, LayoutError> {
    parse_layout_named("custom", text)
}

pub fn parse_layout_named(name: &str, text: &str) -> Result<KitchenLayout, LayoutError> {
    let rows: Vec<&str> = text.lines().collect();
    let rows: Vec<&str> = match rows.iter().rposition(|r| !r.is_empty()) {
        Some(last) => rows[..=last].to_vec(),
        None => return Err(LayoutError::MalformedGrid("empty layout".into())),
    };
    let width = rows[0].chars().count();
    if width == 0 {
        return Err(LayoutError::MalformedGrid("empty first row".into()));
    }
    if let Some((i, r)) = rows
        .iter()
        .enumerate()
        .find(|(_, r)| r.chars().count() != width)
    {
        return Err(LayoutError::MalformedGrid(format!(
            "row {i} has {} cells, expected {width}",
            r.chars().count()
        )));
    }
    let height = rows.len();
    let mut cells = Vec::with_capacity(width * height);
    let mut stations: Vec<Vec<Pos>> = vec![Vec::new(); StationKind::ALL.len()];
    let mut spawn: [Option<Pos>; 2] = [None, None];
    for (row, line) in rows.iter().enumerate() {
        for (col, ch) in line.chars().enumerate() {
            let pos = Pos::new(row, col);
            let cell = match ch {
                ' ' => Cell::Floor,
                '#' => Cell::Wall,
                '1' | '2' => {
                    let slot = &mut spawn[if ch == '1' { 0 } else { 1 }];
                    if slot.is_some() {
                        return Err(LayoutError::MalformedGrid(format!("duplicate spawn {ch}")));
                    }
                    *slot = Some(pos);
                    Cell::Floor
                }
                other => match StationKind::from_char(other) {
                    Some(kind) => {
                        let list = &mut stations[kind as usize];
                        list.push(pos);
                        Cell::Station(StationId::new(kind, list.len() - 1))
                    }
                    None => {
                        return Err(LayoutError::MalformedGrid(format!(
                            "unknown cell {other:?} at row {row}, column {col}"
                        )))
                    }
                },
            };
            cells.push(cell);
        }
    }
    let spawn = match spawn {
        [Some(a), Some(b)] => [a, b],
        _ => {
            return Err(LayoutError::MalformedGrid(
                "layout needs spawn points 1 and 2".into(),
            ))
        }
    };
    let mut layout = KitchenLayout {
        name: name.to_string(),
        width,
        height,
        cells,
        accessible: stations.iter().map(|l| vec![[false; 2]; l.len()]).collect(),
        stations,
        spawn,
        warnings: Vec::new(),
    };
    layout.compute_access();
    Ok(layout)
}

impl KitchenLayout {
    pub fn cell(&self, pos: Pos) -> Cell {
        self.cells[pos.row * self.width + pos.col]
    }

    pub fn is_floor(&self, pos: Pos) -> bool {
        self.cell(pos) == Cell::Floor
    }

    pub fn station_at(&self, pos: Pos) -> Option<StationId> {
        match self.cell(pos) {
            Cell::Station(id) => Some(id),
            _ => None,
        }
    }

    pub fn stations(&self, kind: StationKind) -> &[Pos] {
        &self.stations[kind as usize]
    }

    pub fn station_pos(&self, id: StationId) -> Option<Pos> {
        self.stations(id.kind).get(id.index).copied()
    }

    pub fn station_ids(&self, kind: StationKind) -> impl Iterator<Item = StationId> + '_ {
        (0..self.stations(kind).len()).map(move |i| StationId::new(kind, i))
    }

    /// Whether chef `player`'s spawn region touches the station.
    pub fn accessible(&self, id: StationId, player: usize) -> bool {
        self.accessible[id.kind as usize][id.index][player]
    }

    pub fn step(&self, pos: Pos, dir: Direction) -> Option<Pos> {
        let (r, c) = (pos.row as isize, pos.col as isize);
        let (r, c) = match dir {
            Direction::Up => (r - 1, c),
            Direction::Down => (r + 1, c),
            Direction::Left => (r, c - 1),
            Direction::Right => (r, c + 1),
        };
        if r < 0 || c < 0 || r as usize >= self.height || c as usize >= self.width {
            None
        } else {
            Some(Pos::new(r as usize, c as usize))
        }
    }

    /// Floor cells orthogonally next to `pos`, each with the direction that faces `pos` from it.
    pub fn access_cells(&self, pos: Pos) -> Vec<(Pos, Direction)> {
        Direction::ALL
            .into_iter()
            .filter_map(|d| {
                let n = self.step(pos, d)?;
                self.is_floor(n).then_some((n, d.opposite()))
            })
            .collect()
    }

    pub fn floor_reachable(&self, from: Pos) -> Vec<bool> {
        let mut seen = vec![false; self.cells.len()];
        let mut queue = VecDeque::from([from]);
        seen[from.row * self.width + from.col] = true;
        while let Some(p) = queue.pop_front() {
            for d in Direction::ALL {
                if let Some(n) = self.step(p, d) {
                    let i = n.row * self.width + n.col;
                    if self.is_floor(n) && !seen[i] {
                        seen[i] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        seen
    }

    fn compute_access(&mut self) {
        let regions = [
            self.floor_reachable(self.spawn[0]),
            self.floor_reachable(self.spawn[1]),
        ];
        for kind in StationKind::ALL {
            for (i, &pos) in self.stations[kind as usize].iter().enumerate() {
                let cells = self.access_cells(pos);
                let flags = [0, 1].map(|p| {
                    cells
                        .iter()
                        .any(|(c, _)| regions[p][c.row * self.width + c.col])
                });
                self.accessible[kind as usize][i] = flags;
                if kind != StationKind::Counter && !flags[0] && !flags[1] {
                    self.warnings
                        .push(LayoutWarning::UnreachableStation(StationId::new(kind, i)));
                }
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in 0..self.height {
            for col in 0..self.width {
                let pos = Pos::new(row, col);
                let ch = match self.cell(pos) {
                    Cell::Floor if pos == self.spawn[0] => '1',
                    Cell::Floor if pos == self.spawn[1] => '2',
                    Cell::Floor => ' ',
                    Cell::Wall => '#',
                    Cell::Station(id) => id.kind.to_char(),
                };
                out.push(ch);
            }
            if row + 1 < self.height {
                out.push('\n');
            }
        }
        out
    }
}

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../data/layouts/", $name, ".layout")))),*]
    };
}

/// Layouts shipped with the crate: approximations of the five classic kitchens.
pub const BUNDLED_LAYOUTS: &[(&str, &str)] = bundled!(
    "cramped_room",
    "asymmetric_advantages",
    "coordination_ring",
    "forced_coordination",
    "counter_circuit",
);

pub fn bundled_layout(name: &str) -> Option<KitchenLayout> {
    BUNDLED_LAYOUTS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, text)| parse_layout_named(n, text).expect("bundled layouts parse"))
}
