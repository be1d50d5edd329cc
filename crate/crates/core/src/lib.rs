//! Core of a three-dimensional partitioned quantum cellular automaton with
//! 2x2x2 blocks of binary cells.
//!
//! The crate is `no_std` and only needs an allocator. It covers the block
//! geometry, the scattering rule, finite superpositions of configurations,
//! the alternating-partition evolution and the gate gadgets built on top.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod block;
pub mod evolution;
pub mod gadgets;
pub mod gate;
pub mod rule;
pub mod state;

mod error;

pub use error::Error;
pub use num_complex::Complex64;
