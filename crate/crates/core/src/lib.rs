//! Exact machinery for Holant problems, matchgates and perfect-matching
//! counting: FKT on embedded planar graphs, the genus expansion into planar
//! constituents, the grid-tiling reductions, and the apex / mod-2^k
//! permanent pipelines. Everything is computed in exact Gaussian-rational
//! arithmetic; there is no floating-point path anywhere in this crate.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live
//! in the companion `holkit` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod apex;
pub mod bits;
pub mod embedding;
pub mod error;
pub mod fkt;
pub mod gate;
pub mod genus;
pub mod graph;
pub mod gridtiling;
pub mod matchgates;
pub mod matching;
pub mod matrix;
pub mod mod2k;
pub mod modring;
pub mod psub;
pub mod scalar;
pub mod sig_graph;
pub mod signature;
pub mod testgen;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
