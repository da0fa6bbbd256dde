//! Randomized search for large bi-holes (balanced edgeless vertex pairs) and
//! balanced colorings of bipartite graphs, plus the exact brute-force
//! oracles, seeded generators, and multi-trial experiment harness used to
//! study them. Every randomized routine is driven by an explicit [`Seed`]
//! and is bit-for-bit reproducible; see [`rng`] for the stream rules.

pub mod bihole;
pub mod coloring;
pub mod error;
pub mod gen;
pub mod graph;
pub mod harness;
pub mod matching;
pub mod oracle;
pub mod report;
pub mod rng;

pub use error::Error;
pub use graph::{BipartiteGraph, InducedSubgraph, Ratio, Side, VertexRef};
pub use rng::{Rng64, Seed};
