//! Matchings, covers, and resilience of random k-uniform hypergraphs.
//!
//! The crate samples `K_p(n, k)`, computes matching and covering numbers
//! exactly, builds the cover bases used to bound families with small matching
//! number, and searches small instances exhaustively for the largest family
//! with `ν(F) ≤ s`.

mod error;

pub mod combinatorics;
pub mod family;
pub mod graph;
pub mod harness;
pub mod mask;
pub mod oracle;
pub mod regime;
pub mod resilience;
pub mod sampler;

pub use error::{Error, Result};
pub use family::{Cover, Family, Matching};

/// Vertices are 1-based.
pub type Vertex = u32;
