//! Exact brute-force reference solvers for small instances.
//!
//! These are deliberately independent of the randomized algorithms in this
//! crate — different traversal styles, different data layouts — so that
//! agreement between the two is meaningful evidence of correctness. Each
//! solver enforces a hard size cap and reports how many search states it
//! expanded, which makes regressions in pruning visible.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::graph::BipartiteGraph;

/// Largest side length accepted by [`max_bihole_exact`].
pub const BIHOLE_ORACLE_CAP: usize = 24;
/// Largest side length accepted by [`chi_b_exact`].
pub const CHI_B_ORACLE_CAP: usize = 8;
/// Largest side length accepted by [`max_matching_exact`].
pub const MATCHING_ORACLE_CAP: usize = 12;

/// An exact answer together with a witness achieving it and the number of
/// search states expanded to find it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult<W> {
    pub value: usize,
    pub witness: W,
    pub explored: u64,
}

fn left_row_masks(g: &BipartiteGraph) -> Vec<u32> {
    (0..g.left_count())
        .map(|u| {
            let mut m = 0u32;
            for &v in g.neighbors_of_left(u) {
                m |= 1 << v;
            }
            m
        })
        .collect()
}

/// Largest `t` such that the graph contains `t` left and `t` right vertices
/// with no edges between the two sets, plus one such pair of sets.
///
/// Branch and bound over left subsets in index order, tracking the set of
/// right vertices covered (adjacent to the subset so far); a branch dies
/// when even taking every remaining left vertex cannot beat the incumbent.
/// The witness is canonical: the lowest-index `t` members of the winning
/// left set and the lowest-index `t` uncovered right vertices.
pub fn max_bihole_exact(
    g: &BipartiteGraph,
) -> Result<OracleResult<(Vec<usize>, Vec<usize>)>, Error> {
    let (nl, nr) = (g.left_count(), g.right_count());
    let n = nl.max(nr);
    if n > BIHOLE_ORACLE_CAP {
        return Err(Error::OracleCap { n, cap: BIHOLE_ORACLE_CAP });
    }
    let rows = left_row_masks(g);
    let full_r: u32 = if nr == 0 { 0 } else { u32::MAX >> (32 - nr) };

    struct Search<'a> {
        rows: &'a [u32],
        nl: usize,
        nr: usize,
        best: usize,
        best_x: u32,
        best_cov: u32,
        explored: u64,
    }
    impl Search<'_> {
        fn rec(&mut self, u: usize, x_mask: u32, x_count: usize, cov: u32) {
            self.explored += 1;
            let avail = self.nr - cov.count_ones() as usize;
            if u == self.nl {
                let t = x_count.min(avail);
                if t > self.best {
                    self.best = t;
                    self.best_x = x_mask;
                    self.best_cov = cov;
                }
                return;
            }
            if (x_count + (self.nl - u)).min(avail) <= self.best {
                return;
            }
            self.rec(u + 1, x_mask | 1 << u, x_count + 1, cov | self.rows[u]);
            self.rec(u + 1, x_mask, x_count, cov);
        }
    }

    let mut s = Search { rows: &rows, nl, nr, best: 0, best_x: 0, best_cov: full_r, explored: 0 };
    s.rec(0, 0, 0, 0);

    let xs: Vec<usize> = (0..nl).filter(|&u| s.best_x >> u & 1 == 1).take(s.best).collect();
    let ys: Vec<usize> = (0..nr).filter(|&v| s.best_cov >> v & 1 == 0).take(s.best).collect();
    debug_assert_eq!(xs.len(), s.best);
    debug_assert_eq!(ys.len(), s.best);
    Ok(OracleResult { value: s.best, witness: (xs, ys), explored: s.explored })
}

const CHI_INF: i8 = 100;

struct ChiSearch {
    cov: Vec<u16>,
    n: usize,
    full: u16,
    memo: Vec<i8>,
    explored: u64,
}

impl ChiSearch {
    fn rec(&mut self, lmask: u16, rmask: u16) -> i8 {
        if lmask == self.full {
            return 0;
        }
        let idx = ((lmask as usize) << self.n) | rmask as usize;
        if self.memo[idx] >= 0 {
            return self.memo[idx];
        }
        self.explored += 1;
        let u = (!lmask & self.full).trailing_zeros();
        let rest = !lmask & self.full & !(1 << u);
        let uncolored_r = !rmask & self.full;
        let mut best = CHI_INF;
        let mut sub = rest;
        loop {
            let x = sub | (1 << u);
            let k = x.count_ones();
            let avail = uncolored_r & !self.cov[x as usize];
            if avail.count_ones() >= k {
                let mut y = avail;
                loop {
                    if y.count_ones() == k {
                        let v = self.rec(lmask | x, rmask | y);
                        if v < CHI_INF && v + 1 < best {
                            best = v + 1;
                        }
                    }
                    if y == 0 {
                        break;
                    }
                    y = (y - 1) & avail;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        self.memo[idx] = best;
        best
    }

    /// Replay the memoized table, emitting the first optimal class at each
    /// step in the same enumeration order the search used.
    fn replay(&mut self, mut lmask: u16, mut rmask: u16) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut classes = Vec::new();
        while lmask != self.full {
            let here = self.rec(lmask, rmask);
            let u = (!lmask & self.full).trailing_zeros();
            let rest = !lmask & self.full & !(1 << u);
            let uncolored_r = !rmask & self.full;
            let mut chosen = None;
            let mut sub = rest;
            'outer: loop {
                let x = sub | (1 << u);
                let k = x.count_ones();
                let avail = uncolored_r & !self.cov[x as usize];
                if avail.count_ones() >= k {
                    let mut y = avail;
                    loop {
                        if y.count_ones() == k && self.rec(lmask | x, rmask | y) + 1 == here {
                            chosen = Some((x, y));
                            break 'outer;
                        }
                        if y == 0 {
                            break;
                        }
                        y = (y - 1) & avail;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            let (x, y) = chosen.expect("optimal state has an optimal first class");
            classes.push((
                (0..self.n).filter(|&i| x >> i & 1 == 1).collect(),
                (0..self.n).filter(|&i| y >> i & 1 == 1).collect(),
            ));
            lmask |= x;
            rmask |= y;
        }
        classes
    }
}

/// Minimum number of classes over all partitions of a balanced graph into
/// classes `(X_i, Y_i)` with `|X_i| = |Y_i| >= 1` and no `X_i`–`Y_i` edges,
/// with one optimal partition as witness.
///
/// Exact-cover dynamic program over pairs of colored-vertex masks: the
/// lowest uncolored left vertex anchors the next class, which removes the
/// usual factorial symmetry over class orderings. Errors with
/// [`Error::Infeasible`] when no such partition exists.
pub fn chi_b_exact(
    g: &BipartiteGraph,
) -> Result<OracleResult<Vec<(Vec<usize>, Vec<usize>)>>, Error> {
    if !g.is_balanced() {
        return Err(Error::Unbalanced {
            left_count: g.left_count(),
            right_count: g.right_count(),
        });
    }
    let n = g.left_count();
    if n > CHI_B_ORACLE_CAP {
        return Err(Error::OracleCap { n, cap: CHI_B_ORACLE_CAP });
    }
    if n == 0 {
        return Ok(OracleResult { value: 0, witness: Vec::new(), explored: 0 });
    }

    let rows: Vec<u16> = left_row_masks(g).iter().map(|&m| m as u16).collect();
    let mut cov = vec![0u16; 1 << n];
    for x in 1usize..1 << n {
        let lo = x.trailing_zeros() as usize;
        cov[x] = cov[x & (x - 1)] | rows[lo];
    }
    let full = ((1u32 << n) - 1) as u16;
    let mut s = ChiSearch { cov, n, full, memo: vec![-1; 1 << (2 * n)], explored: 0 };
    let value = s.rec(0, 0);
    if value >= CHI_INF {
        return Err(Error::Infeasible);
    }
    let witness = s.replay(0, 0);
    debug_assert_eq!(witness.len(), value as usize);
    Ok(OracleResult { value: value as usize, witness, explored: s.explored })
}

/// Maximum matching size in the graph itself (`complement = false`) or in
/// its bipartite complement (`complement = true`), with one maximum
/// matching as witness.
///
/// Bitmask dynamic program over (next left vertex, used right vertices).
/// The witness walk prefers matching each left vertex to its lowest-index
/// usable right vertex whenever that does not reduce the total.
pub fn max_matching_exact(
    g: &BipartiteGraph,
    complement: bool,
) -> Result<OracleResult<Vec<(usize, usize)>>, Error> {
    let (nl, nr) = (g.left_count(), g.right_count());
    let n = nl.max(nr);
    if n > MATCHING_ORACLE_CAP {
        return Err(Error::OracleCap { n, cap: MATCHING_ORACLE_CAP });
    }
    let full: u32 = if nr == 0 { 0 } else { u32::MAX >> (32 - nr) };
    let rows: Vec<u32> = left_row_masks(g)
        .iter()
        .map(|&m| if complement { !m & full } else { m })
        .collect();

    struct Dp<'a> {
        rows: &'a [u32],
        nl: usize,
        nr: usize,
        memo: Vec<i8>,
        explored: u64,
    }
    impl Dp<'_> {
        fn rec(&mut self, u: usize, used: u32) -> i8 {
            if u == self.nl {
                return 0;
            }
            let idx = u * (1 << self.nr) + used as usize;
            if self.memo[idx] >= 0 {
                return self.memo[idx];
            }
            self.explored += 1;
            let mut best = self.rec(u + 1, used);
            let mut open = self.rows[u] & !used;
            while open != 0 {
                let bit = open & open.wrapping_neg();
                let v = 1 + self.rec(u + 1, used | bit);
                if v > best {
                    best = v;
                }
                open &= open - 1;
            }
            self.memo[idx] = best;
            best
        }
    }

    let mut dp = Dp { rows: &rows, nl, nr, memo: vec![-1; nl.max(1) << nr], explored: 0 };
    let value = dp.rec(0, 0) as usize;

    let mut pairs = Vec::new();
    let mut used = 0u32;
    for u in 0..nl {
        let here = dp.rec(u, used);
        let mut open = rows[u] & !used;
        let mut taken = false;
        while open != 0 {
            let bit = open & open.wrapping_neg();
            if 1 + dp.rec(u + 1, used | bit) == here {
                pairs.push((u, bit.trailing_zeros() as usize));
                used |= bit;
                taken = true;
                break;
            }
            open &= open - 1;
        }
        debug_assert!(taken || dp.rec(u + 1, used) == here);
        let _ = taken;
    }
    debug_assert_eq!(pairs.len(), value);
    Ok(OracleResult { value, witness: pairs, explored: dp.explored })
}
