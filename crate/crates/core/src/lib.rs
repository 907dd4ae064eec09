//! Path-XOR cellular automata over directed tile sets.
//!
//! The crate is organised bottom-up:
//!
//! - [`hilbert`]: discrete Hilbert paths, the 12-tile substitution system built
//!   from them, unique derivation, and the square-filling check for paths.
//! - [`tiles`]: directed tile sets (the constraint-free `{↑,→}` family and
//!   Kari's Hilbert tiles), finite grids, local validity, hierarchical valid
//!   patches, path tracing and path-graph components.
//! - [`automaton`]: finite groups, the automaton that adds the successor's group
//!   value along valid cells, its time-sliced variant, trajectory words and the
//!   constructive preimage.
//! - [`entropy`]: exact and sampled word counting, entropy-rate fits,
//!   periodicity, Bernoulli Monte Carlo experiments.
//! - [`freegroup`]: the majority-vote automaton on the free group of rank two.
//! - [`io`]: the JSON/CSV interchange formats used by the CLI.

pub mod automaton;
pub mod entropy;
pub mod error;
pub mod freegroup;
pub mod hilbert;
pub mod io;
pub mod lattice;
pub mod rng;
pub mod tiles;

pub use error::{Error, Result};
pub use lattice::{Cell, Dir};
