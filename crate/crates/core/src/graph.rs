//! Immutable bipartite graphs in compressed adjacency (CSR) form, stored in
//! both orientations so left-to-right and right-to-left scans are equally
//! cheap. Vertices are `0..left_count` and `0..right_count` per side; every
//! adjacency slice is strictly increasing. The bipartite complement is never
//! materialized — algorithms that need it walk the sorted adjacency with a
//! merge-skip.

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// One endpoint, identified by side and index.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexRef {
    pub side: Side,
    pub index: usize,
}

impl VertexRef {
    pub fn left(index: usize) -> Self {
        VertexRef { side: Side::Left, index }
    }
    pub fn right(index: usize) -> Self {
        VertexRef { side: Side::Right, index }
    }
}

/// Exact nonnegative rational, always reduced. Used where a quantity is
/// defined as a ratio of integers and rounding it early would shift
/// thresholds computed from it.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    /// `den` must be positive.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "ratio denominator must be positive");
        let g = gcd(num.max(1), den);
        let g = if num == 0 { den } else { g };
        Ratio { num: num / g, den: den / g }
    }

    pub fn num(self) -> u64 {
        self.num
    }
    pub fn den(self) -> u64 {
        self.den
    }
    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    left_count: usize,
    right_count: usize,
    edge_count: usize,
    left_offsets: Vec<usize>,
    left_adj: Vec<usize>,
    right_offsets: Vec<usize>,
    right_adj: Vec<usize>,
}

/// An induced subgraph together with the tables mapping its new indices back
/// to the parent graph (`left_map[new] == old`).
#[derive(Clone, Debug)]
pub struct InducedSubgraph {
    pub graph: BipartiteGraph,
    pub left_map: Vec<usize>,
    pub right_map: Vec<usize>,
}

impl BipartiteGraph {
    /// Build from an edge list. Edges are deduplicated; out-of-range edges
    /// are rejected naming the offending pair.
    pub fn build(
        left_count: usize,
        right_count: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self, Error> {
        for &(u, v) in edges {
            if u >= left_count || v >= right_count {
                return Err(Error::EdgeOutOfRange {
                    left: u,
                    right: v,
                    left_count,
                    right_count,
                });
            }
        }
        let mut sorted: Vec<(usize, usize)> = edges.to_vec();
        sorted.sort_unstable();
        sorted.dedup();

        let mut adj = vec![Vec::new(); left_count];
        for (u, v) in sorted {
            adj[u].push(v);
        }
        Ok(Self::from_sorted_adjacency(left_count, right_count, adj))
    }

    /// Internal constructor for callers that already hold strictly
    /// increasing, in-range adjacency lists (generators, induced subgraphs).
    pub(crate) fn from_sorted_adjacency(
        left_count: usize,
        right_count: usize,
        adj: Vec<Vec<usize>>,
    ) -> Self {
        debug_assert_eq!(adj.len(), left_count);
        debug_assert!(adj
            .iter()
            .all(|l| l.windows(2).all(|w| w[0] < w[1]) && l.iter().all(|&v| v < right_count)));

        let edge_count: usize = adj.iter().map(Vec::len).sum();
        let mut left_offsets = Vec::with_capacity(left_count + 1);
        let mut left_adj = Vec::with_capacity(edge_count);
        left_offsets.push(0);
        for list in &adj {
            left_adj.extend_from_slice(list);
            left_offsets.push(left_adj.len());
        }

        // Transpose: counting pass, then placement, yields sorted lists
        // because left indices are consumed in increasing order.
        let mut right_offsets = vec![0usize; right_count + 1];
        for &v in &left_adj {
            right_offsets[v + 1] += 1;
        }
        for i in 0..right_count {
            right_offsets[i + 1] += right_offsets[i];
        }
        let mut right_adj = vec![0usize; edge_count];
        let mut cursor = right_offsets.clone();
        for u in 0..left_count {
            for &v in &adj[u] {
                right_adj[cursor[v]] = u;
                cursor[v] += 1;
            }
        }

        BipartiteGraph {
            left_count,
            right_count,
            edge_count,
            left_offsets,
            left_adj,
            right_offsets,
            right_adj,
        }
    }

    pub fn left_count(&self) -> usize {
        self.left_count
    }
    pub fn right_count(&self) -> usize {
        self.right_count
    }
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }
    pub fn is_balanced(&self) -> bool {
        self.left_count == self.right_count
    }

    pub fn neighbors_of_left(&self, u: usize) -> &[usize] {
        &self.left_adj[self.left_offsets[u]..self.left_offsets[u + 1]]
    }

    pub fn neighbors_of_right(&self, v: usize) -> &[usize] {
        &self.right_adj[self.right_offsets[v]..self.right_offsets[v + 1]]
    }

    pub fn left_degree(&self, u: usize) -> usize {
        self.left_offsets[u + 1] - self.left_offsets[u]
    }

    pub fn right_degree(&self, v: usize) -> usize {
        self.right_offsets[v + 1] - self.right_offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors_of_left(u).binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.left_count)
            .flat_map(move |u| self.neighbors_of_left(u).iter().map(move |&v| (u, v)))
    }

    /// Maximum degree over both sides. Zero on an edgeless graph.
    pub fn max_degree(&self) -> usize {
        let left = (0..self.left_count).map(|u| self.left_degree(u)).max();
        let right = (0..self.right_count).map(|v| self.right_degree(v)).max();
        left.into_iter().chain(right).max().unwrap_or(0)
    }

    /// Average left degree `|E| / left_count` as an exact rational: the
    /// thresholds derived from it are computed in real arithmetic, so the
    /// value itself must not be pre-rounded.
    pub fn average_degree(&self) -> Result<Ratio, Error> {
        if self.left_count == 0 {
            return Err(Error::EmptyLeftSide);
        }
        Ok(Ratio::new(self.edge_count as u64, self.left_count as u64))
    }

    /// Number of non-neighbors of `v` on the opposite side.
    pub fn complement_degree(&self, v: VertexRef) -> Result<usize, Error> {
        match v.side {
            Side::Left => {
                if v.index >= self.left_count {
                    return Err(Error::VertexOutOfRange {
                        side: Side::Left,
                        index: v.index,
                        count: self.left_count,
                    });
                }
                Ok(self.right_count - self.left_degree(v.index))
            }
            Side::Right => {
                if v.index >= self.right_count {
                    return Err(Error::VertexOutOfRange {
                        side: Side::Right,
                        index: v.index,
                        count: self.right_count,
                    });
                }
                Ok(self.left_count - self.right_degree(v.index))
            }
        }
    }

    /// Remove exactly `count_per_side` highest-degree vertices from each
    /// side, measuring degrees in `self` (both removals are decided before
    /// either is applied). Ties break toward the lower index. Returns the
    /// surviving graph and the removed index sets, sorted ascending.
    pub fn trim_high_degree(
        &self,
        count_per_side: usize,
    ) -> Result<(BipartiteGraph, Vec<usize>, Vec<usize>), Error> {
        if count_per_side > self.left_count || count_per_side > self.right_count {
            return Err(Error::TrimTooLarge {
                requested: count_per_side,
                left_count: self.left_count,
                right_count: self.right_count,
            });
        }
        let pick = |count: usize, degree_of: &dyn Fn(usize) -> usize| -> Vec<usize> {
            let mut order: Vec<usize> = (0..count).collect();
            order.sort_by_key(|&i| (std::cmp::Reverse(degree_of(i)), i));
            let mut removed: Vec<usize> = order[..count_per_side].to_vec();
            removed.sort_unstable();
            removed
        };
        let removed_left = pick(self.left_count, &|u| self.left_degree(u));
        let removed_right = pick(self.right_count, &|v| self.right_degree(v));

        let keep = |count: usize, removed: &[usize]| -> Vec<usize> {
            let mut gone = vec![false; count];
            for &i in removed {
                gone[i] = true;
            }
            (0..count).filter(|&i| !gone[i]).collect()
        };
        let keep_left = keep(self.left_count, &removed_left);
        let keep_right = keep(self.right_count, &removed_right);
        let induced = self.induced(&keep_left, &keep_right)?;
        Ok((induced.graph, removed_left, removed_right))
    }

    /// Induced subgraph on the given vertex subsets, which must be strictly
    /// increasing and in range. New indices follow the order of the inputs.
    pub fn induced(
        &self,
        keep_left: &[usize],
        keep_right: &[usize],
    ) -> Result<InducedSubgraph, Error> {
        validate_subset(keep_left, self.left_count, Side::Left)?;
        validate_subset(keep_right, self.right_count, Side::Right)?;

        const ABSENT: usize = usize::MAX;
        let mut right_new = vec![ABSENT; self.right_count];
        for (new, &old) in keep_right.iter().enumerate() {
            right_new[old] = new;
        }

        let adj: Vec<Vec<usize>> = keep_left
            .iter()
            .map(|&old_u| {
                self.neighbors_of_left(old_u)
                    .iter()
                    .filter_map(|&old_v| {
                        let nv = right_new[old_v];
                        (nv != ABSENT).then_some(nv)
                    })
                    .collect()
            })
            .collect();

        Ok(InducedSubgraph {
            graph: Self::from_sorted_adjacency(keep_left.len(), keep_right.len(), adj),
            left_map: keep_left.to_vec(),
            right_map: keep_right.to_vec(),
        })
    }
}

fn validate_subset(subset: &[usize], count: usize, side: Side) -> Result<(), Error> {
    let mut prev: Option<usize> = None;
    for &i in subset {
        let increasing = prev.map_or(true, |p| i > p);
        if i >= count || !increasing {
            return Err(Error::BadSubset { side, index: i });
        }
        prev = Some(i);
    }
    Ok(())
}

/// Parse the plain-text edge-list format:
///
/// ```text
/// # optional comment lines
/// <left_count> <right_count> <edge_count>
/// <left> <right>      (edge_count lines, 0-based)
/// ```
///
/// Comment lines starting with `#` may appear anywhere; tokens are separated
/// by ASCII whitespace. The declared edge count must match exactly.
pub fn parse_edge_list(text: &str) -> Result<BipartiteGraph, Error> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                msg: "blank line".into(),
            });
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 3 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("header needs 3 fields, got {}", fields.len()),
                    });
                }
                let parse = |s: &str| -> Result<usize, Error> {
                    s.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("invalid integer {s:?}"),
                    })
                };
                header = Some((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
            }
            Some((l, r, m)) => {
                if edges.len() == m {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("more than the declared {m} edges"),
                    });
                }
                if fields.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("edge needs 2 fields, got {}", fields.len()),
                    });
                }
                let parse = |s: &str| -> Result<usize, Error> {
                    s.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("invalid integer {s:?}"),
                    })
                };
                let (u, v) = (parse(fields[0])?, parse(fields[1])?);
                if u >= l || v >= r {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("edge ({u}, {v}) out of range for {l}x{r}"),
                    });
                }
                edges.push((u, v));
            }
        }
    }

    match header {
        None => Err(Error::Parse {
            line: text.lines().count() + 1,
            msg: "missing header".into(),
        }),
        Some((l, r, m)) => {
            if edges.len() != m {
                return Err(Error::Parse {
                    line: text.lines().count() + 1,
                    msg: format!("declared {m} edges, found {}", edges.len()),
                });
            }
            BipartiteGraph::build(l, r, &edges)
        }
    }
}

/// Serialize to the same format; edges come out sorted by (left, right), so
/// `parse_edge_list(serialize_edge_list(g)) == g` and equal graphs produce
/// identical bytes.
pub fn serialize_edge_list(g: &BipartiteGraph) -> String {
    let mut out = String::with_capacity(16 + 8 * g.edge_count());
    out.push_str(&format!(
        "{} {} {}\n",
        g.left_count(),
        g.right_count(),
        g.edge_count()
    ));
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
