//! Maximum matching in the *bipartite complement*: pairs `(u, v)` such that
//! `u — v` is **not** an edge of the input graph.
//!
//! This is the feasibility backbone for balanced coloring. A balanced graph
//! admits a partition into classes `(X_i, Y_i)` with `|X_i| = |Y_i|` and no
//! edges between `X_i` and `Y_i` exactly when the complement has a perfect
//! matching: singleton classes `({u}, {v})` can be read off such a matching,
//! and conversely picking one left and one right vertex from each class of
//! any such partition (largest classes first) yields a system of distinct
//! representatives, i.e. a perfect complement matching.
//!
//! The algorithm is deterministic: a greedy pass seeds the matching in left
//! index order (each left vertex takes its lowest-index free non-neighbor),
//! then Hopcroft–Karp phases run to optimality. Complement adjacency is
//! never materialized; both the greedy pass and the search phases walk a
//! sorted list of still-available right vertices in lockstep with the
//! (sorted) real adjacency list, so a sparse input costs roughly
//! `O(E + n·phases)` instead of the `O(n^2)` size of its complement.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::graph::BipartiteGraph;

/// A matching in the bipartite complement of some graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    /// Matched pairs `(left, right)`, sorted by left index. Every pair is a
    /// non-edge of the graph the matching was computed from.
    pub pairs: Vec<(usize, usize)>,
    /// True when the matching saturates both sides, which requires the graph
    /// to be balanced.
    pub perfect: bool,
}

const NONE: usize = usize::MAX;

/// Sorted singly-traversable list of right vertices with O(1) unlink.
/// Removed nodes keep their forward pointer, so a cursor saved before a
/// recursive call may sit on a dead node and still advance correctly (it can
/// only skip nodes that were themselves removed).
struct RightList {
    next: Vec<usize>,
    prev: Vec<usize>,
    head: usize,
    len: usize,
}

impl RightList {
    fn full(n: usize) -> Self {
        RightList {
            next: (1..=n).collect(),
            prev: (0..n).map(|v| v.wrapping_sub(1)).collect(),
            head: if n == 0 { NONE } else { 0 },
            len: n,
        }
    }

    fn unlink(&mut self, v: usize) {
        let nv = self.next[v];
        if v == self.head {
            self.head = if nv == self.next.len() { NONE } else { nv };
        } else {
            self.next[self.prev[v]] = nv;
        }
        if nv < self.next.len() {
            self.prev[nv] = self.prev[v];
        }
        self.len -= 1;
    }

    fn succ(&self, v: usize) -> usize {
        let nv = self.next[v];
        if nv == self.next.len() {
            NONE
        } else {
            nv
        }
    }
}

/// Walk the available-rights list starting at `cursor`, skipping every
/// vertex present in the sorted slice `adj`; returns the first available
/// non-neighbor (and the adjacency position to resume from), or `NONE`.
fn next_non_neighbor(list: &RightList, adj: &[usize], mut ai: usize, mut cursor: usize) -> (usize, usize) {
    while cursor != NONE {
        while ai < adj.len() && adj[ai] < cursor {
            ai += 1;
        }
        if ai < adj.len() && adj[ai] == cursor {
            cursor = list.succ(cursor);
            continue;
        }
        return (cursor, ai);
    }
    (NONE, ai)
}

/// Maximum matching in the bipartite complement of `g`. Deterministic for a
/// given graph; handles unbalanced graphs (the result then cannot be
/// perfect).
pub fn max_matching_complement(g: &BipartiteGraph) -> Matching {
    let nl = g.left_count();
    let nr = g.right_count();
    let mut match_left = vec![NONE; nl];
    let mut match_right = vec![NONE; nr];

    greedy_seed(g, &mut match_left, &mut match_right);

    let mut dist = vec![NONE; nl];
    loop {
        let dist_nil = bfs_layers(g, &match_left, &match_right, &mut dist);
        if dist_nil == NONE {
            break;
        }
        let mut list = RightList::full(nr);
        for u in 0..nl {
            if match_left[u] == NONE {
                augment(g, u, dist_nil, &dist, &mut match_left, &mut match_right, &mut list);
            }
        }
    }

    let pairs: Vec<(usize, usize)> = match_left
        .iter()
        .enumerate()
        .filter_map(|(u, &v)| (v != NONE).then_some((u, v)))
        .collect();
    let perfect = nl == nr && pairs.len() == nl;
    Matching { pairs, perfect }
}

/// Left-index-order greedy pass: each left vertex takes its lowest-index
/// free complement neighbor. `lowest_free` never moves backwards, so the
/// scan resumes where previous lefts left off.
fn greedy_seed(g: &BipartiteGraph, match_left: &mut [usize], match_right: &mut [usize]) {
    let nr = match_right.len();
    let mut lowest_free = 0usize;
    for (u, slot) in match_left.iter_mut().enumerate() {
        if lowest_free >= nr {
            break;
        }
        let adj = g.neighbors_of_left(u);
        let mut ai = 0usize;
        let mut v = lowest_free;
        while v < nr {
            while ai < adj.len() && adj[ai] < v {
                ai += 1;
            }
            if ai < adj.len() && adj[ai] == v {
                v += 1;
                continue;
            }
            if match_right[v] == NONE {
                *slot = v;
                match_right[v] = u;
                if v == lowest_free {
                    lowest_free += 1;
                    while lowest_free < nr && match_right[lowest_free] != NONE {
                        lowest_free += 1;
                    }
                }
                break;
            }
            v += 1;
        }
    }
}

/// One Hopcroft–Karp BFS over the complement. Fills `dist` for left
/// vertices (layer numbers on alternating paths from free lefts) and
/// returns the layer of the nearest free right vertex, or `NONE` when no
/// augmenting path exists. Each right vertex is claimed at most once per
/// phase by unlinking it from a shared availability list.
fn bfs_layers(
    g: &BipartiteGraph,
    match_left: &[usize],
    match_right: &[usize],
    dist: &mut [usize],
) -> usize {
    let nl = match_left.len();
    let nr = match_right.len();
    let mut frontier = Vec::new();
    for u in 0..nl {
        if match_left[u] == NONE {
            dist[u] = 0;
            frontier.push(u);
        } else {
            dist[u] = NONE;
        }
    }
    let mut list = RightList::full(nr);
    let mut layer = 0usize;
    let mut found = NONE;
    while !frontier.is_empty() && found == NONE {
        let mut next_frontier = Vec::new();
        for &u in &frontier {
            let adj = g.neighbors_of_left(u);
            let mut ai = 0usize;
            let mut cursor = list.head;
            loop {
                let (v, ai2) = next_non_neighbor(&list, adj, ai, cursor);
                if v == NONE {
                    break;
                }
                ai = ai2;
                cursor = list.succ(v);
                list.unlink(v);
                let w = match_right[v];
                if w == NONE {
                    found = layer + 1;
                } else {
                    dist[w] = layer + 1;
                    next_frontier.push(w);
                }
            }
        }
        layer += 1;
        frontier = next_frontier;
    }
    found
}

/// Layered DFS for one augmenting path rooted at free left `u`. Right
/// vertices are unlinked from `list` only when the layer condition admits
/// them, so siblings at the right layer stay reachable for other roots.
fn augment(
    g: &BipartiteGraph,
    u: usize,
    dist_nil: usize,
    dist: &[usize],
    match_left: &mut [usize],
    match_right: &mut [usize],
    list: &mut RightList,
) -> bool {
    let adj = g.neighbors_of_left(u);
    let mut ai = 0usize;
    let mut cursor = list.head;
    loop {
        let (v, ai2) = next_non_neighbor(list, adj, ai, cursor);
        if v == NONE {
            return false;
        }
        ai = ai2;
        cursor = list.succ(v);
        let w = match_right[v];
        if w == NONE {
            if dist[u] + 1 == dist_nil {
                list.unlink(v);
                match_left[u] = v;
                match_right[v] = u;
                return true;
            }
        } else if dist[w] == dist[u] + 1 {
            list.unlink(v);
            if augment(g, w, dist_nil, dist, match_left, match_right, list) {
                match_left[u] = v;
                match_right[v] = u;
                return true;
            }
        }
    }
}

/// Feasibility test for balanced coloring: a balanced graph can be
/// partitioned into equal-size mutually non-adjacent classes iff its
/// complement has a perfect matching. Returns the matching so callers can
/// reuse it (each pair is a valid singleton class).
pub fn has_balanced_coloring(g: &BipartiteGraph) -> Result<(bool, Matching), Error> {
    if !g.is_balanced() {
        return Err(Error::Unbalanced {
            left_count: g.left_count(),
            right_count: g.right_count(),
        });
    }
    let m = max_matching_complement(g);
    Ok((m.perfect, m))
}
