use thiserror::Error;

use crate::graph::Side;

/// Domain and input errors shared across the crate. Algorithmic outcomes
/// that are answers rather than misuse (an infeasible coloring instance, a
/// missed target) are reported through result types, not through `Error`.
#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("edge ({left}, {right}) out of range for a {left_count}x{right_count} graph")]
    EdgeOutOfRange {
        left: usize,
        right: usize,
        left_count: usize,
        right_count: usize,
    },

    #[error("{side:?} vertex {index} out of range (side has {count} vertices)")]
    VertexOutOfRange {
        side: Side,
        index: usize,
        count: usize,
    },

    #[error("cannot remove {requested} vertices per side from a {left_count}x{right_count} graph")]
    TrimTooLarge {
        requested: usize,
        left_count: usize,
        right_count: usize,
    },

    #[error("subset for induced subgraph must be strictly increasing and in range (bad entry {index} on {side:?} side)")]
    BadSubset { side: Side, index: usize },

    #[error("average degree undefined: graph has no left vertices")]
    EmptyLeftSide,

    #[error("operation requires a balanced graph, got {left_count}x{right_count}")]
    Unbalanced {
        left_count: usize,
        right_count: usize,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    BadEpsilon(f64),

    #[error("instance exceeds the exhaustive-search cap ({n} > {cap})")]
    OracleCap { n: usize, cap: usize },

    #[error("graph must satisfy n >= 2 * max_degree for matching-based coloring (n = {n}, max degree = {max_degree})")]
    DegreeTooHigh { n: usize, max_degree: usize },

    #[error("no balanced coloring exists: the bipartite complement has no perfect matching")]
    Infeasible,

    #[error("coloring phase {phase} failed: {reason}")]
    PhaseFailed {
        phase: &'static str,
        reason: String,
    },
}
