//! Search for edge-dense unit-distance graphs on the Moser lattice.
//!
//! The crate is `no_std` (with `alloc`) and performs no I/O; results leave the
//! search through the [`search::GraphSink`] trait.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod canonical;
pub mod genealogy;
pub mod isoclass;
pub mod lattice;
pub mod search;

pub use canonical::{CanonicalGraph, GraphMatrix, ZobristTable};
pub use lattice::LatticePoint;
