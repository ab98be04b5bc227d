//! Achievable rate regions and capacity regions for two-receiver discrete
//! memoryless broadcast channels where each receiver already knows part of
//! the other receiver's private message.
//!
//! Five messages `M1..M5` are sent: `M1` is common, receiver 1 wants
//! `(M1, M2, M4)` and knows `M5`, receiver 2 wants `(M1, M3, M5)` and knows
//! `M4`. Rates are in bits per channel use.

pub mod classifier;
pub mod cli;
pub mod error;
pub mod info;
pub mod io;
pub mod lattice;
pub mod lp;
pub mod optimizer;
pub mod polytope;
pub mod probability;
pub mod rate_regions;
pub mod simulator;

pub use error::{Error, Result};
