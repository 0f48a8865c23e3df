//! Game environments.
//!
//! Two backends share the [`Environment`] trait: the deterministic
//! [`Simulator`] that plays authored `.world` files, and the
//! [`InterpreterSession`] that drives an external Z-machine interpreter in
//! dumb-terminal mode.

mod interp;
mod sim;
mod world;

use serde::{Deserialize, Serialize};

pub use interp::{parse_interpreter_output, InterpreterConfig, InterpreterSession, OutputPatterns, RestartStrategy, INTERPRETER_ENV_VAR};
pub use sim::{Simulator, REFUSAL};
pub use world::{EnemySpec, ObjectSpec, Room, WinCondition, WorldSpec};

use crate::Result;

/// One observation returned by the game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Percept {
    /// Full game response with whitespace normalized and the status line removed.
    pub description: String,
    pub score: i64,
    pub moves: u32,
    pub dead: bool,
    pub won: bool,
    /// Only set when the percept answers an inventory query.
    pub inventory_listing: Option<String>,
}

impl Percept {
    pub fn is_terminal(&self) -> bool {
        self.dead || self.won
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Simulator,
    Interpreter,
}

/// Bookkeeping for one live game session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionHandle {
    pub backend: Backend,
    /// Number of restarts performed so far.
    pub episode: u32,
    /// Commands sent since the last (re)start. Inventory queries are not counted.
    pub steps: u32,
}

impl SessionHandle {
    pub(crate) fn new(backend: Backend) -> Self {
        SessionHandle {
            backend,
            episode: 0,
            steps: 0,
        }
    }

    pub(crate) fn restarted(&mut self) {
        self.episode += 1;
        self.steps = 0;
    }
}

/// A running game the agent can talk to.
pub trait Environment: Send {
    fn handle(&self) -> &SessionHandle;

    /// The most recent percept (the opening one right after start/restart).
    fn current(&self) -> &Percept;

    /// Sends one command. Fails with a usage error once the game is over.
    fn step(&mut self, command: &str) -> Result<Percept>;

    /// Returns to the opening position. Agent memory is the caller's business.
    fn restart(&mut self) -> Result<Percept>;

    /// Item names currently carried, in acquisition order. Does not count as a step.
    fn query_inventory(&mut self) -> Result<Vec<String>>;

    /// The game's maximum attainable score, when known.
    fn max_score(&self) -> Option<i64>;
}
