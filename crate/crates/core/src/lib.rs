//! Markov semantic model over word patterns.
//!
//! The crate turns a plain-text document into long-range transition
//! statistics between word patterns, detects topical patterns from their
//! recurrence times, estimates an empirical Markov matrix, grows semantic
//! cliques around topics and condenses each clique into an eigenvalue
//! fingerprint that can be compared across languages. It also carries a
//! small synthetic-chain laboratory used to check the distributional
//! results the model rests on.
//!
//! Everything here is `no_std` with `alloc`; file formats, IO and the
//! command-line front end live in the `lisf` crate.

#![no_std]

extern crate alloc;

pub mod align;
pub mod analysis;
pub mod assignment;
pub mod chainlab;
pub mod corpus;
pub mod error;
pub mod linalg;
pub mod markov;
pub mod qa;
pub mod semantics;
pub mod stats;

mod math;

pub use error::{Error, Result};
