//! Pre-defined sparse connectivity for connected (fully/sparsely connected)
//! neural-network layers.
//!
//! The crate covers three layers of functionality:
//!
//! - [`topology`]: junction specifications with exact fan-in/fan-out, density
//!   arithmetic, connection-pattern generators (random biregular and planned
//!   windowed patterns) and adjacency-matrix composition across junctions.
//! - [`scatter`]: window partitions, window adjacency matrices and the
//!   forward/backward scatter metric used to rank connection patterns
//!   without training them.
//! - [`net`] and [`data`]: a from-scratch sparse multilayer perceptron that
//!   stores weights only for existing edges, plus the datasets used to
//!   exercise it (synthesized Morse symbols and IDX-encoded MNIST).
//!
//! Everything here is `no_std` + `alloc` and deterministic: every random
//! choice flows from a [`rng::SplitMix64`] seeded by the caller.
//!
//! Indexing is 0-based throughout the Rust API. File formats in the
//! companion `sparsenet` crate use 1-based layer, junction and neuron indices.

#![no_std]

extern crate alloc;

pub mod data;
pub mod error;
pub mod net;
pub mod rng;
pub mod scatter;
pub mod topology;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
