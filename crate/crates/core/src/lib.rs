//! Pure-coordination games for two players, a memory/reasoning/grounding agent
//! pipeline that plays them through text, and a multiple-choice evaluation suite.
//!
//! Start with [`env::EnvConfig`] to build a game, seat two [`game::Agent`]s, and
//! call [`env::run_episode`].

pub mod agent;
pub mod backend;
pub mod env;
pub mod game;
pub mod hanabi;
pub mod harness;
pub mod kitchen;
pub mod pursuit;
pub mod qa;
pub mod rng;
pub mod stats;
pub mod text;

pub use game::{Agent, Decision, DecisionView, EpisodeResult, GameEnv, GameKind};
pub use rng::Seed;
