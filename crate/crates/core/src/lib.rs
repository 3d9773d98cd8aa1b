//! Exact lattice toolkit and symmetry-reduced search engine for lines on
//! 2-polarized K3 surfaces, modelled inside Niemeier lattices.

pub mod arith;
pub mod bounds;
pub mod classify;
pub mod clique;
pub mod config;
pub mod discriminant;
pub mod error;
pub mod golay;
pub mod graph;
pub mod lattice;
pub mod lines;
pub mod matrix;
pub mod niemeier;
pub mod orbits;
pub mod perm;
pub mod registry;
pub mod roots;
pub mod search;
pub mod shortvec;
pub mod sublattice;
pub mod symmetry;
pub mod toy;

pub use error::{Error, Result};
