//! Two-chef grid kitchen: fetch onions, fill cookers, plate soup, deliver.

pub mod layout;
pub mod macros;
pub mod state;

pub use layout::{
    bundled_layout, parse_layout, parse_layout_named, Cell, Direction, KitchenLayout, LayoutError,
    LayoutWarning, Pos, StationId, StationKind, BUNDLED_LAYOUTS,
};
pub use macros::{
    closest_empty_counter, distance_field, feasible_macros, ground, macro_actions, reach,
    GroundError, MacroAction, MacroOption, Reach,
};
pub use state::{
    tick, Chef, Cooker, CookerStatus, Item, KitchenState, Primitive, COOK_TIME, DELIVERY_REWARD,
};

use serde::{Deserialize, Serialize};

/// Default episode length in ticks.
pub const DEFAULT_HORIZON: u32 = 400;

/// Runs chosen macros one primitive per tick until each completes.
///
/// A chef with no running macro is waiting for a decision. Macros are re-planned
/// every tick against the partner's current cell, abort when no path remains,
/// and finish on the tick their final primitive executes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacroRunner {
    pub state: KitchenState,
    pub horizon: u32,
    pub active: [Option<MacroAction>; 2],
}

impl MacroRunner {
    pub fn new(state: KitchenState, horizon: u32) -> Self {
        MacroRunner {
            state,
            horizon,
            active: [None, None],
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.state.tick >= self.horizon
    }

    pub fn pending(&self) -> Vec<usize> {
        if self.is_terminal() {
            return Vec::new();
        }
        (0..2).filter(|&p| self.active[p].is_none()).collect()
    }

    pub fn assign(&mut self, player: usize, action: MacroAction) {
        self.active[player] = Some(action);
    }

    /// Execute one tick and return the primitives used.
    pub fn advance(&mut self) -> [Primitive; 2] {
        let mut moves = [Primitive::Stay; 2];
        let mut finishing = [false; 2];
        for p in 0..2 {
            let Some(action) = self.active[p] else {
                continue;
            };
            match ground(&self.state, p, action) {
                Ok(plan) => {
                    moves[p] = plan[0];
                    finishing[p] = plan.len() == 1;
                }
                Err(e) => {
                    tracing::debug!(player = p, %action, error = %e, "macro aborted");
                    self.active[p] = None;
                }
            }
        }
        // Plans avoid the partner's current cell, so the only possible conflict is
        // both chefs heading for the same free cell. The second chef yields.
        if let (Some(a), Some(b)) = (self.target_cell(0, moves[0]), self.target_cell(1, moves[1])) {
            if a == b {
                moves[1] = Primitive::Stay;
                finishing[1] = false;
            }
        }
        self.state.tick(moves);
        for p in 0..2 {
            if finishing[p] {
                self.active[p] = None;
            }
        }
        moves
    }

    fn target_cell(&self, player: usize, mv: Primitive) -> Option<Pos> {
        let dir = mv.direction()?;
        let next = self.state.layout.step(self.state.chefs[player].pos, dir)?;
        self.state.layout.is_floor(next).then_some(next)
    }
}
