//! Two oblivious robots entering an m x n grid through a corner door must meet
//! at a resource that an adversary keeps moving. This crate simulates the
//! synchronous rendezvous protocol, searches every adversary behaviour on small
//! grids, checks the protocol's structural invariants on traces and
//! demonstrates the semi-synchronous escape.
//!
//! Coordinates: `x` is the column in `0..n`, `y` the row in `0..m`.

pub mod adversary;
pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod grid;
pub mod policy;
pub mod render;
pub mod sweep;
pub mod trace_io;
pub mod verifier;

pub use adversary::{ResourceMove, StrategyId};
pub use config::{Configuration, Phase, RobotId, RobotState, RobotView};
pub use engine::{run_episode, ssync_run, Episode, Outcome, SimParams, Trace};
pub use error::{Error, Result};
pub use grid::{GridSpec, Vertex};
pub use policy::{decide, DynamicRendezvous, EntryChoice, Move, Policy};
