//! Driver for the unit-distance graph search: a sharded text database of
//! discovered graphs, binary checkpoints, configuration files, SVG drawings
//! and the `udg` command line.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod error;
pub mod render;
pub mod store;

pub use error::{Error, Result};
pub use udg_core;
