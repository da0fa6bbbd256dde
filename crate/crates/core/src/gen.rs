//! Seeded random and structured bipartite graph constructions used by
//! experiments and tests. Every generator is a pure function of its
//! arguments: `gnnp` consumes one Bernoulli draw per (left, right) pair from
//! `Rng64::from_seed(seed)` in row-major order (all pairs of left 0, then
//! left 1, ...), so graphs are identical across runs, platforms, and any
//! reimplementation that follows the stream rules in [`crate::rng`].

use crate::graph::BipartiteGraph;
use crate::rng::Seed;

/// Random balanced bipartite graph: each of the `n * n` pairs is an edge
/// independently with probability `p`. `p` must lie in `[0, 1]`.
pub fn gnnp(n: usize, p: f64, seed: Seed) -> BipartiteGraph {
    assert!((0.0..=1.0).contains(&p), "edge probability {p} outside [0, 1]");
    let mut rng = seed.rng();
    let mut adj = vec![Vec::new(); n];
    for row in adj.iter_mut() {
        for v in 0..n {
            if rng.bernoulli(p) {
                row.push(v);
            }
        }
    }
    BipartiteGraph::from_sorted_adjacency(n, n, adj)
}

/// Left vertex 0 adjacent to every right vertex; all other lefts isolated.
pub fn full_star(n: usize) -> BipartiteGraph {
    let mut adj = vec![Vec::new(); n];
    if n > 0 {
        adj[0] = (0..n).collect();
    }
    BipartiteGraph::from_sorted_adjacency(n, n, adj)
}

/// Complete balanced bipartite graph.
pub fn complete(n: usize) -> BipartiteGraph {
    let adj = vec![(0..n).collect::<Vec<_>>(); n];
    BipartiteGraph::from_sorted_adjacency(n, n, adj)
}

/// Edgeless balanced bipartite graph.
pub fn empty(n: usize) -> BipartiteGraph {
    BipartiteGraph::from_sorted_adjacency(n, n, vec![Vec::new(); n])
}

/// The matching `i — i` for every `i`.
pub fn perfect_matching(n: usize) -> BipartiteGraph {
    let adj = (0..n).map(|i| vec![i]).collect();
    BipartiteGraph::from_sorted_adjacency(n, n, adj)
}

/// Exactly `d`-regular balanced graph: left `u` is adjacent to rights
/// `(u + j) mod n` for `j < d`. Requires `d <= n`. Useful when an
/// experiment needs every degree pinned to the maximum instead of merely
/// bounded by it.
pub fn circulant(n: usize, d: usize) -> BipartiteGraph {
    assert!(d <= n, "degree {d} exceeds side size {n}");
    let adj = (0..n)
        .map(|u| {
            let mut row: Vec<usize> = (0..d).map(|j| (u + j) % n).collect();
            row.sort_unstable();
            row
        })
        .collect();
    BipartiteGraph::from_sorted_adjacency(n, n, adj)
}

/// Delete edges at maximum-degree vertices until no degree exceeds `cap`,
/// deterministically:
///
/// * among vertices of current maximum degree, take the left side before the
///   right and the lowest index within a side;
/// * from that vertex, delete the edge to its highest-degree neighbor
///   (lowest index on ties).
///
/// Removing edges at the hottest endpoints first keeps the deletion count
/// close to the total degree excess.
pub fn cap_max_degree(g: &BipartiteGraph, cap: usize) -> BipartiteGraph {
    let nl = g.left_count();
    let nr = g.right_count();
    let mut left_deg: Vec<usize> = (0..nl).map(|u| g.left_degree(u)).collect();
    let mut right_deg: Vec<usize> = (0..nr).map(|v| g.right_degree(v)).collect();

    // Edge store with per-vertex incidence lists and an alive mask.
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut alive = vec![true; edges.len()];
    let mut left_inc = vec![Vec::new(); nl];
    let mut right_inc = vec![Vec::new(); nr];
    for (i, &(u, v)) in edges.iter().enumerate() {
        left_inc[u].push(i);
        right_inc[v].push(i);
    }

    // Vertices keyed so that `last()` is the deletion target: highest degree
    // first, then left side before right, then lower index first.
    let key = |deg: usize, side: u8, idx: usize| (deg, 1 - side, usize::MAX - idx);
    let mut queue = std::collections::BTreeSet::new();
    for u in 0..nl {
        queue.insert(key(left_deg[u], 0, u));
    }
    for v in 0..nr {
        queue.insert(key(right_deg[v], 1, v));
    }

    while let Some(&top) = queue.last() {
        let (deg, side_inv, idx_inv) = top;
        if deg <= cap {
            break;
        }
        let side = 1 - side_inv;
        let idx = usize::MAX - idx_inv;

        // Pick the incident edge whose other endpoint has the largest
        // degree, breaking ties toward the lower index.
        let (inc, other_deg): (&Vec<usize>, &Vec<usize>) = if side == 0 {
            (&left_inc[idx], &right_deg)
        } else {
            (&right_inc[idx], &left_deg)
        };
        let mut best: Option<(usize, usize, usize)> = None; // (deg, other, edge)
        for &e in inc {
            if !alive[e] {
                continue;
            }
            let other = if side == 0 { edges[e].1 } else { edges[e].0 };
            let d = other_deg[other];
            let better = match best {
                None => true,
                Some((bd, bo, _)) => d > bd || (d == bd && other < bo),
            };
            if better {
                best = Some((d, other, e));
            }
        }
        let (_, other, e) =
            best.expect("vertex with positive degree has a live incident edge");
        alive[e] = false;
        let (u, v) = edges[e];
        debug_assert!(if side == 0 { u == idx && v == other } else { v == idx && u == other });

        queue.remove(&key(left_deg[u], 0, u));
        left_deg[u] -= 1;
        queue.insert(key(left_deg[u], 0, u));
        queue.remove(&key(right_deg[v], 1, v));
        right_deg[v] -= 1;
        queue.insert(key(right_deg[v], 1, v));
    }

    let kept: Vec<(usize, usize)> = edges
        .iter()
        .zip(&alive)
        .filter_map(|(&e, &a)| a.then_some(e))
        .collect();
    BipartiteGraph::build(nl, nr, &kept).expect("edges came from a valid graph")
}
