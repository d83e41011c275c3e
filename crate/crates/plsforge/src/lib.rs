//! Local-search games and PLS reduction compilers.
//!
//! Cut games (Max-Cut and Node-Max-Cut), weighted network congestion games
//! with linear latencies, the BridgeGaps approximation algorithm, three
//! instance compilers with their solution maps, and brute-force oracles.
//! All arithmetic is exact.

pub mod bridgegaps;
pub mod circuit;
pub mod congestion;
pub mod error;
pub mod games_core;
pub mod io;
pub mod oracle;
pub mod reductions;
pub mod weight;

pub use error::{Error, Result};
pub use weight::Weight;
