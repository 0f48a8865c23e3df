//! An autonomous player for parser-based text adventures.
//!
//! The crate is split along the agent's concerns: [`env`] talks to games,
//! [`lexicon`] holds word statistics, [`commands`] turns descriptions into
//! scored candidate commands, [`mapper`] keeps the location graph,
//! [`agent`] plays, and [`harness`] runs and scores episodes.

pub mod agent;
pub mod commands;
pub mod data;
pub mod env;
mod error;
pub mod harness;
pub mod lexicon;
pub mod mapper;
pub mod text;

pub use error::{Error, Result};
