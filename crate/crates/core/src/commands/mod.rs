//! Command patterns and the generate, score, select pipeline.

mod db;
mod generate;
mod scoring;
mod select;

pub use db::{CommandDb, CommandPattern, BATTLE_VERBS};
pub use generate::{generate_candidates, instantiate, item_noun, CandidateCommand, Scene, Substitution, SynonymMap};
pub use scoring::{FactorWeights, Factors, ScoringParams};
pub use select::{roulette_index, select};
