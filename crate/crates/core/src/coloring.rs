//! Balanced coloring of bounded-degree bipartite graphs.
//!
//! A balanced coloring partitions both sides into classes of equal size per
//! color such that no class contains an edge. Feasibility is equivalent to
//! the bipartite complement having a perfect matching, which is checked up
//! front and reused by the fallback.
//!
//! The randomized pipeline colors the left side uniformly with a primary
//! palette of `q` colors, list-colors the right side from the colors missing
//! on each vertex's neighborhood, equalizes class sizes by uncoloring
//! surplus right vertices, and then repairs the uncolored remainder `S'`.
//! When `S'` is small relative to `n / max_degree^2`, a patch moves matching
//! numbers of conflict-free left vertices into one fresh star color. When
//! `S'` is large, a resampled random subset of left vertices of equal size
//! is selected so that the residual graph induced on (selected, `S'`) has
//! max degree at most `d* = ceil(max_degree / ln^1.5 max_degree)`, and that
//! residual is finished with the matching-based closer on fresh colors.
//! Any phase failure retries the whole attempt on a derived seed, and the
//! ladder ends in a global matching-based coloring (at most
//! `2 * max_degree + 1` colors), an exhaustive search for tiny graphs, or an
//! honest failure report.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::graph::BipartiteGraph;
use crate::matching::{has_balanced_coloring, max_matching_complement, Matching};
use crate::oracle::chi_b_exact;
use crate::report::{GraphDescriptor, Outcome, ParamRecord, TrialMetrics, TrialReport};
use crate::rng::Seed;

/// A total coloring of both sides. Colors are arbitrary `usize` ids;
/// `palette_size` is the number of distinct ids in use across both sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedColoring {
    pub left_colors: Vec<usize>,
    pub right_colors: Vec<usize>,
    pub palette_size: usize,
}

impl BalancedColoring {
    /// Wrap color assignments, counting the distinct colors used.
    pub fn new(left_colors: Vec<usize>, right_colors: Vec<usize>) -> Self {
        let palette: BTreeSet<usize> = left_colors
            .iter()
            .chain(right_colors.iter())
            .copied()
            .collect();
        BalancedColoring {
            left_colors,
            right_colors,
            palette_size: palette.len(),
        }
    }
}

/// Check the three balanced-coloring invariants: both sides fully colored
/// (vector lengths match the graph), every color class has equally many left
/// and right vertices, and no edge joins two vertices of the same color.
pub fn verify_coloring(g: &BipartiteGraph, coloring: &BalancedColoring) -> bool {
    if coloring.left_colors.len() != g.left_count()
        || coloring.right_colors.len() != g.right_count()
    {
        return false;
    }
    let mut balance: HashMap<usize, i64> = HashMap::new();
    for &c in &coloring.left_colors {
        *balance.entry(c).or_insert(0) += 1;
    }
    for &c in &coloring.right_colors {
        *balance.entry(c).or_insert(0) -= 1;
    }
    if balance.values().any(|&d| d != 0) {
        return false;
    }
    for (u, v) in g.edges() {
        if coloring.left_colors[u] == coloring.right_colors[v] {
            return false;
        }
    }
    true
}

/// Tuning knobs for [`color_balanced`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColoringParams {
    /// Accuracy knob in (0, 1); smaller values enlarge the primary palette.
    pub epsilon: f64,
    /// Root seed; attempt `i > 0` runs on `seed.child(i)`.
    pub seed: Seed,
    /// Extra full-pipeline attempts after the first.
    pub retries: u32,
    /// Cap on resampling steps in the residual selection. `None` applies the
    /// default `1000 * (n + q)`.
    pub resample_cap: Option<u64>,
}

/// Which repair path a run took.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    SmallS,
    LargeS,
    FallbackGlobal,
    Infeasible,
}

/// Step-by-step record of one coloring run, for debugging and experiments.
/// All vertex lists are sorted ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColoringTrace {
    /// Primary palette size; 0 when the pipeline never ran (infeasible input
    /// or a direct fallback on max degree at most 2).
    pub q: usize,
    /// The primary palette, `0..q`.
    pub colors: Vec<usize>,
    /// Per right vertex, the sorted list of primary colors absent from its
    /// neighborhood at list-coloring time. Empty list = vertex stayed
    /// uncolored there.
    pub available_lists: Vec<Vec<usize>>,
    /// The residual set `S'`: rights uncolored after list coloring plus
    /// rights uncolored by equalization.
    pub uncolored_s: Vec<usize>,
    /// Rights uncolored by the equalization step (`S_0`).
    pub equalize_removed: Vec<usize>,
    /// Per color `c`, how many left vertices of class `c` must be recolored
    /// so the class balances (`a_c`). Sums to `|S'|`.
    pub deficits: Vec<usize>,
    /// Per color `c`, the left vertices of class `c` with at most `d*`
    /// neighbors in `S'` (large-`S'` path only).
    pub candidates: Vec<Vec<usize>>,
    /// Left vertices selected for recoloring against `S'` (`S_U`).
    pub selected_su: Vec<usize>,
    /// Left vertices in the random sample the selection was drawn from.
    pub sampled_su: Vec<usize>,
    /// The star color absorbing `S'` on the small-`S'` path, when used.
    pub star_color: Option<usize>,
    pub phase_taken: Phase,
    /// Resampling steps performed by the residual selection.
    pub resamples: u64,
}

impl ColoringTrace {
    fn shell(q: usize, phase: Phase) -> Self {
        ColoringTrace {
            q,
            colors: (0..q).collect(),
            available_lists: Vec::new(),
            uncolored_s: Vec::new(),
            equalize_removed: Vec::new(),
            deficits: Vec::new(),
            candidates: Vec::new(),
            selected_su: Vec::new(),
            sampled_su: Vec::new(),
            star_color: None,
            phase_taken: phase,
            resamples: 0,
        }
    }
}

/// Terminal result of a coloring run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColoringOutcome {
    Colored { coloring: BalancedColoring },
    Infeasible,
    Failure { reason: String },
}

impl ColoringOutcome {
    pub fn coloring(&self) -> Option<&BalancedColoring> {
        match self {
            ColoringOutcome::Colored { coloring } => Some(coloring),
            _ => None,
        }
    }
}

/// Everything produced by one call to [`color_balanced`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColoringRun {
    pub outcome: ColoringOutcome,
    pub trace: ColoringTrace,
    pub report: TrialReport,
}

/// Assign each left vertex an independent uniform color from `0..q`, in
/// index order along the seeded stream.
pub fn phase1_color_u(g: &BipartiteGraph, q: usize, seed: Seed) -> Vec<usize> {
    assert!(q > 0, "palette must be nonempty");
    let mut rng = seed.rng();
    (0..g.left_count()).map(|_| rng.below(q)).collect()
}

/// List-color the right side: each vertex draws uniformly from the primary
/// colors absent on its neighborhood, in index order. Vertices whose list is
/// empty stay `None` and consume no draw. Returns the colors and the
/// availability lists.
pub fn phase2_color_v(
    g: &BipartiteGraph,
    left_colors: &[usize],
    q: usize,
    seed: Seed,
) -> (Vec<Option<usize>>, Vec<Vec<usize>>) {
    let mut rng = seed.rng();
    let nr = g.right_count();
    let mut colors = Vec::with_capacity(nr);
    let mut lists = Vec::with_capacity(nr);
    let mut seen = vec![false; q];
    for v in 0..nr {
        seen.fill(false);
        for &u in g.neighbors_of_right(v) {
            seen[left_colors[u]] = true;
        }
        let avail: Vec<usize> = (0..q).filter(|&c| !seen[c]).collect();
        if avail.is_empty() {
            colors.push(None);
        } else {
            colors.push(Some(avail[rng.below(avail.len())]));
        }
        lists.push(avail);
    }
    (colors, lists)
}

/// For every color whose right class outnumbers its left class, uncolor the
/// surplus lowest-index right vertices. Returns the sorted list of vertices
/// uncolored here and, per color, the remaining deficit
/// `|left class| - |right class|` (now nonnegative).
pub fn equalize(
    left_colors: &[usize],
    right_colors: &mut [Option<usize>],
    q: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut left_sizes = vec![0usize; q];
    for &c in left_colors {
        left_sizes[c] += 1;
    }
    let mut right_members: Vec<Vec<usize>> = vec![Vec::new(); q];
    for (v, c) in right_colors.iter().enumerate() {
        if let Some(c) = c {
            right_members[*c].push(v);
        }
    }
    let mut removed = Vec::new();
    let mut deficits = vec![0usize; q];
    for c in 0..q {
        let have = right_members[c].len();
        if have > left_sizes[c] {
            for &v in &right_members[c][..have - left_sizes[c]] {
                right_colors[v] = None;
                removed.push(v);
            }
        } else {
            deficits[c] = left_sizes[c] - have;
        }
    }
    removed.sort_unstable();
    (removed, deficits)
}

/// Small-residual repair: give every vertex of `s_prime` the star color and,
/// for each color `c`, recolor to the star the `deficits[c]` lowest-index
/// left vertices of class `c` that have no neighbor in `s_prime`. Fails when
/// some class has too few such vertices.
pub fn small_s_patch(
    g: &BipartiteGraph,
    left_colors: &mut [usize],
    right_colors: &mut [Option<usize>],
    s_prime: &[usize],
    deficits: &[usize],
    star_color: usize,
) -> Result<(), Error> {
    let mut blocked = vec![false; g.left_count()];
    for &v in s_prime {
        for &u in g.neighbors_of_right(v) {
            blocked[u] = true;
        }
    }
    let mut remaining = deficits.to_vec();
    let mut chosen = Vec::new();
    for (u, &c) in left_colors.iter().enumerate() {
        if remaining[c] > 0 && !blocked[u] {
            remaining[c] -= 1;
            chosen.push(u);
        }
    }
    if let Some(c) = remaining.iter().position(|&r| r > 0) {
        return Err(Error::PhaseFailed {
            phase: "small_s_patch",
            reason: format!(
                "class {c} has too few recolorable vertices ({} short)",
                remaining[c]
            ),
        });
    }
    for &u in &chosen {
        left_colors[u] = star_color;
    }
    for &v in s_prime {
        right_colors[v] = Some(star_color);
    }
    Ok(())
}

/// Output of the residual selection: the chosen left set `S_U` (sorted, same
/// size as `S'`), the raw random sample it came from, and the number of
/// resampling steps spent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualSelection {
    pub selected: Vec<usize>,
    pub sampled: Vec<usize>,
    pub resamples: u64,
}

/// Large-residual selection. Every left vertex is sampled independently with
/// probability `p`; while any constraint is violated, the lowest-numbered
/// violated constraint has its variables redrawn. Constraints, in order: for
/// each `v` in `s_prime` (by rank), at most `d_star` of its neighbors are
/// sampled; for each color `c`, strictly more than `class_floor` members of
/// `candidates[c]` are sampled. Afterwards the `deficits[c]` lowest-index
/// sampled candidates of each class form the selection.
///
/// Fails when the resample budget runs out, when a constraint is
/// unsatisfiable outright (a candidate class no larger than `class_floor`,
/// or a deficit exceeding its candidate pool), or when the final sample
/// cannot cover some deficit.
#[allow(clippy::too_many_arguments)]
pub fn select_su(
    g: &BipartiteGraph,
    s_prime: &[usize],
    candidates: &[Vec<usize>],
    deficits: &[usize],
    d_star: usize,
    class_floor: usize,
    p: f64,
    resample_cap: u64,
    seed: Seed,
) -> Result<ResidualSelection, Error> {
    let q = candidates.len();
    assert_eq!(deficits.len(), q);
    for c in 0..q {
        if candidates[c].len() <= class_floor {
            return Err(Error::PhaseFailed {
                phase: "select_su",
                reason: format!(
                    "class {c} has only {} candidates against a floor of {class_floor}",
                    candidates[c].len()
                ),
            });
        }
        if deficits[c] > candidates[c].len() {
            return Err(Error::PhaseFailed {
                phase: "select_su",
                reason: format!(
                    "class {c} needs {} vertices but has {} candidates",
                    deficits[c],
                    candidates[c].len()
                ),
            });
        }
    }

    let nl = g.left_count();
    let s_len = s_prime.len();
    let mut s_rank = vec![usize::MAX; g.right_count()];
    for (rank, &v) in s_prime.iter().enumerate() {
        s_rank[v] = rank;
    }
    let mut cand_class = vec![usize::MAX; nl];
    for (c, class) in candidates.iter().enumerate() {
        for &u in class {
            cand_class[u] = c;
        }
    }

    let mut state = Resampler {
        g,
        s_rank,
        cand_class,
        in_sample: vec![false; nl],
        nbr_count: vec![0usize; s_len],
        class_count: vec![0usize; q],
        violated: (s_len..s_len + q).collect(),
        s_len,
        d_star,
        class_floor,
    };
    let mut rng = seed.rng();
    for u in 0..nl {
        let val = rng.bernoulli(p);
        state.set(u, val);
    }

    let mut resamples = 0u64;
    while let Some(&event) = state.violated.iter().next() {
        if resamples >= resample_cap {
            return Err(Error::PhaseFailed {
                phase: "select_su",
                reason: format!("resample budget of {resample_cap} exhausted"),
            });
        }
        let vars: Vec<usize> = if event < s_len {
            g.neighbors_of_right(s_prime[event]).to_vec()
        } else {
            candidates[event - s_len].clone()
        };
        for u in vars {
            let val = rng.bernoulli(p);
            state.set(u, val);
        }
        resamples += 1;
    }

    let mut selected = Vec::with_capacity(s_len);
    for c in 0..q {
        let mut need = deficits[c];
        for &u in &candidates[c] {
            if need == 0 {
                break;
            }
            if state.in_sample[u] {
                selected.push(u);
                need -= 1;
            }
        }
        if need > 0 {
            return Err(Error::PhaseFailed {
                phase: "select_su",
                reason: format!("class {c} sample cannot cover its deficit ({need} short)"),
            });
        }
    }
    selected.sort_unstable();
    // The deficits sum to |S'| by construction, so the selection already has
    // the right size; anything else is a caller bug surfaced as a failure.
    if selected.len() != s_len {
        return Err(Error::PhaseFailed {
            phase: "select_su",
            reason: format!(
                "selection has {} vertices but the residual set has {s_len}",
                selected.len()
            ),
        });
    }
    let sampled: Vec<usize> = (0..nl).filter(|&u| state.in_sample[u]).collect();
    Ok(ResidualSelection {
        selected,
        sampled,
        resamples,
    })
}

/// Incremental bookkeeping for the resampling loop: membership flips update
/// the per-constraint counters and the violated set in O(degree).
struct Resampler<'a> {
    g: &'a BipartiteGraph,
    s_rank: Vec<usize>,
    cand_class: Vec<usize>,
    in_sample: Vec<bool>,
    nbr_count: Vec<usize>,
    class_count: Vec<usize>,
    /// Violated constraint ids: rank of a right vertex, or `s_len + color`.
    violated: BTreeSet<usize>,
    s_len: usize,
    d_star: usize,
    class_floor: usize,
}

impl Resampler<'_> {
    fn set(&mut self, u: usize, val: bool) {
        if self.in_sample[u] == val {
            return;
        }
        self.in_sample[u] = val;
        let c = self.cand_class[u];
        if c != usize::MAX {
            let before = self.class_count[c] <= self.class_floor;
            if val {
                self.class_count[c] += 1;
            } else {
                self.class_count[c] -= 1;
            }
            let after = self.class_count[c] <= self.class_floor;
            self.toggle(self.s_len + c, before, after);
        }
        for &v in self.g.neighbors_of_left(u) {
            let rank = self.s_rank[v];
            if rank == usize::MAX {
                continue;
            }
            let before = self.nbr_count[rank] > self.d_star;
            if val {
                self.nbr_count[rank] += 1;
            } else {
                self.nbr_count[rank] -= 1;
            }
            let after = self.nbr_count[rank] > self.d_star;
            self.toggle(rank, before, after);
        }
    }

    fn toggle(&mut self, id: usize, before: bool, after: bool) {
        if before == after {
            return;
        }
        if after {
            self.violated.insert(id);
        } else {
            self.violated.remove(&id);
        }
    }
}

/// Color a feasible balanced graph by pairing each left vertex with a
/// complement-matched right vertex and giving each pair, in left-index
/// order, the smallest color at or above `palette_offset` unused on either
/// endpoint's neighborhood. Uses at most `2 * max_degree + 1` colors.
///
/// Requires `n >= 2 * max_degree`, which guarantees the complement matching
/// exists; an imperfect matching is reported as infeasible defensively.
pub fn lemma_easy_color(
    g: &BipartiteGraph,
    palette_offset: usize,
) -> Result<BalancedColoring, Error> {
    if !g.is_balanced() {
        return Err(Error::Unbalanced {
            left_count: g.left_count(),
            right_count: g.right_count(),
        });
    }
    let n = g.left_count();
    let delta = g.max_degree();
    if n < 2 * delta {
        return Err(Error::DegreeTooHigh {
            n,
            max_degree: delta,
        });
    }
    let matching = max_matching_complement(g);
    if !matching.perfect {
        return Err(Error::Infeasible);
    }
    Ok(greedy_pair_color(g, palette_offset, &matching))
}

fn greedy_pair_color(
    g: &BipartiteGraph,
    palette_offset: usize,
    matching: &Matching,
) -> BalancedColoring {
    const UNSET: usize = usize::MAX;
    debug_assert!(matching.perfect);
    let mut left = vec![UNSET; g.left_count()];
    let mut right = vec![UNSET; g.right_count()];
    for &(u, v) in &matching.pairs {
        let mut used: Vec<usize> = g
            .neighbors_of_left(u)
            .iter()
            .map(|&w| right[w])
            .chain(g.neighbors_of_right(v).iter().map(|&w| left[w]))
            .filter(|&c| c != UNSET)
            .collect();
        used.sort_unstable();
        used.dedup();
        let mut color = palette_offset;
        for &c in &used {
            if c == color {
                color += 1;
            } else if c > color {
                break;
            }
        }
        left[u] = color;
        right[v] = color;
    }
    BalancedColoring::new(left, right)
}

/// Outcome of one full pipeline attempt (steps 3-6).
struct AttemptOut {
    left_colors: Vec<usize>,
    right_colors: Vec<usize>,
    trace: ColoringTrace,
    s_pre: usize,
    residual_max_degree: Option<usize>,
}

struct AttemptFailure {
    error: Error,
    trace: ColoringTrace,
    s_pre: usize,
}

fn pipeline_attempt(
    g: &BipartiteGraph,
    q: usize,
    delta: usize,
    resample_cap: u64,
    attempt_seed: Seed,
) -> Result<AttemptOut, Box<AttemptFailure>> {
    let n = g.left_count();
    let mut left_colors = phase1_color_u(g, q, attempt_seed.child(1));
    let (mut right_opt, available) = phase2_color_v(g, &left_colors, q, attempt_seed.child(2));
    let s_pre: Vec<usize> = (0..n).filter(|&v| right_opt[v].is_none()).collect();
    let (removed, deficits) = equalize(&left_colors, &mut right_opt, q);
    let mut s_prime: Vec<usize> = s_pre.iter().chain(removed.iter()).copied().collect();
    s_prime.sort_unstable();
    debug_assert_eq!(deficits.iter().sum::<usize>(), s_prime.len());

    let mut trace = ColoringTrace {
        q,
        colors: (0..q).collect(),
        available_lists: available,
        uncolored_s: s_prime.clone(),
        equalize_removed: removed,
        deficits: deficits.clone(),
        candidates: Vec::new(),
        selected_su: Vec::new(),
        sampled_su: Vec::new(),
        star_color: None,
        phase_taken: Phase::SmallS,
        resamples: 0,
    };

    if s_pre.len() <= n / (delta * delta) {
        if let Err(error) =
            small_s_patch(g, &mut left_colors, &mut right_opt, &s_prime, &deficits, q)
        {
            return Err(Box::new(AttemptFailure {
                error,
                trace,
                s_pre: s_pre.len(),
            }));
        }
        trace.star_color = if s_prime.is_empty() { None } else { Some(q) };
        let right_colors = right_opt.into_iter().map(|c| c.unwrap()).collect();
        return Ok(AttemptOut {
            left_colors,
            right_colors,
            trace,
            s_pre: s_pre.len(),
            residual_max_degree: None,
        });
    }

    trace.phase_taken = Phase::LargeS;
    let delta_f = delta as f64;
    let ln_d = delta_f.ln();
    let d_star = (delta_f / ln_d.powf(1.5)).ceil() as usize;
    let class_floor = (n as f64 / (delta_f * ln_d.powf(0.875))).floor() as usize;
    let p = (1.0 / ln_d.powf(1.75)).min(1.0);

    let mut in_s_prime = vec![false; g.right_count()];
    for &v in &s_prime {
        in_s_prime[v] = true;
    }
    let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); q];
    for u in 0..n {
        let load = g
            .neighbors_of_left(u)
            .iter()
            .filter(|&&v| in_s_prime[v])
            .count();
        if load <= d_star {
            candidates[left_colors[u]].push(u);
        }
    }
    trace.candidates = candidates.clone();

    let selection = match select_su(
        g,
        &s_prime,
        &candidates,
        &deficits,
        d_star,
        class_floor,
        p,
        resample_cap,
        attempt_seed.child(3),
    ) {
        Ok(sel) => sel,
        Err(error) => {
            return Err(Box::new(AttemptFailure {
                error,
                trace,
                s_pre: s_pre.len(),
            }))
        }
    };
    trace.resamples = selection.resamples;
    trace.sampled_su = selection.sampled;
    trace.selected_su = selection.selected;

    let fail = |error, trace, s_pre: &Vec<usize>| {
        Err(Box::new(AttemptFailure {
            error,
            trace,
            s_pre: s_pre.len(),
        }))
    };
    let induced = match g.induced(&trace.selected_su, &s_prime) {
        Ok(ind) => ind,
        Err(error) => return fail(error, trace, &s_pre),
    };
    let n_sub = induced.graph.left_count();
    let d_sub = induced.graph.max_degree();
    debug_assert!(d_sub <= d_star);
    if n_sub < 2 * d_sub {
        let error = Error::PhaseFailed {
            phase: "residual",
            reason: format!("residual graph too small for its degree ({n_sub} vs {d_sub})"),
        };
        return fail(error, trace, &s_pre);
    }
    let matching = max_matching_complement(&induced.graph);
    if !matching.perfect {
        let error = Error::PhaseFailed {
            phase: "residual",
            reason: "residual complement matching is not perfect".to_string(),
        };
        return fail(error, trace, &s_pre);
    }
    let sub = greedy_pair_color(&induced.graph, q + 1, &matching);
    for (i, &u) in induced.left_map.iter().enumerate() {
        left_colors[u] = sub.left_colors[i];
    }
    for (j, &v) in induced.right_map.iter().enumerate() {
        right_opt[v] = Some(sub.right_colors[j]);
    }
    let right_colors = right_opt.into_iter().map(|c| c.unwrap()).collect();
    Ok(AttemptOut {
        left_colors,
        right_colors,
        trace,
        s_pre: s_pre.len(),
        residual_max_degree: Some(d_sub),
    })
}

/// Exhaust the fallback ladder: global matching-based coloring when
/// `n >= 2 * max_degree`, exhaustive search when `n <= 8`, otherwise a
/// failure message.
fn fallback_global(g: &BipartiteGraph, matching: &Matching) -> Result<BalancedColoring, String> {
    let n = g.left_count();
    let delta = g.max_degree();
    if n >= 2 * delta {
        return Ok(greedy_pair_color(g, 0, matching));
    }
    if n <= 8 {
        return match chi_b_exact(g) {
            Ok(res) => {
                let mut left = vec![0usize; n];
                let mut right = vec![0usize; n];
                for (color, (xs, ys)) in res.witness.iter().enumerate() {
                    for &u in xs {
                        left[u] = color;
                    }
                    for &v in ys {
                        right[v] = color;
                    }
                }
                Ok(BalancedColoring::new(left, right))
            }
            Err(e) => Err(format!("exhaustive fallback failed: {e}")),
        };
    }
    Err(format!(
        "graph too dense for the matching fallback (n = {n}, max degree = {delta}) \
         and too large for exhaustive search"
    ))
}

/// Balanced-color the graph, or prove infeasibility.
///
/// Runs the randomized pipeline described in the module docs with up to
/// `1 + retries` attempts, then falls back to a global matching-based
/// coloring. Errors only on malformed input: unbalanced sides, an empty
/// graph, or epsilon outside (0, 1). Infeasibility and phase failures are
/// reported in the returned outcome, never as `Err`.
pub fn color_balanced(g: &BipartiteGraph, params: &ColoringParams) -> Result<ColoringRun, Error> {
    if !g.is_balanced() {
        return Err(Error::Unbalanced {
            left_count: g.left_count(),
            right_count: g.right_count(),
        });
    }
    let n = g.left_count();
    if n == 0 {
        return Err(Error::EmptyLeftSide);
    }
    if !(params.epsilon > 0.0 && params.epsilon < 1.0) {
        return Err(Error::BadEpsilon(params.epsilon));
    }

    let (feasible, matching) = has_balanced_coloring(g)?;
    if !feasible {
        return Ok(ColoringRun {
            outcome: ColoringOutcome::Infeasible,
            trace: ColoringTrace::shell(0, Phase::Infeasible),
            report: base_report(g, params, None, Outcome::Infeasible, TrialMetrics::default()),
        });
    }

    let delta = g.max_degree();
    let delta_f = delta as f64;
    // ln(max_degree) > 1 over the integers means max_degree >= 3, so the
    // palette formula below is always finite on this path.
    let q = if delta_f.ln() > 1.0 {
        Some(((1.0 + params.epsilon / 2.0) * delta_f / delta_f.ln()).ceil() as usize)
    } else {
        None
    };
    let pipeline_q = q.filter(|&q| q < 2 * delta + 1);

    let mut metrics = TrialMetrics::default();
    let mut trace = ColoringTrace::shell(q.unwrap_or(0), Phase::FallbackGlobal);
    let mut effective_cap = None;

    if let Some(q) = pipeline_q {
        let cap = params
            .resample_cap
            .unwrap_or(1000 * (n as u64 + q as u64));
        effective_cap = Some(cap);
        metrics.q = Some(q);
        for attempt in 0..=params.retries {
            let attempt_seed = if attempt == 0 {
                params.seed
            } else {
                params.seed.child(attempt as u64)
            };
            match pipeline_attempt(g, q, delta, cap, attempt_seed) {
                Ok(out) => {
                    let coloring = BalancedColoring::new(out.left_colors, out.right_colors);
                    debug_assert!(verify_coloring(g, &coloring));
                    metrics.palette_size = Some(coloring.palette_size);
                    metrics.s_size = Some(out.s_pre);
                    metrics.attempts = Some(attempt + 1);
                    let outcome = match out.trace.phase_taken {
                        Phase::SmallS => Outcome::SmallS,
                        _ => Outcome::LargeS,
                    };
                    if outcome == Outcome::LargeS {
                        metrics.residual_max_degree = out.residual_max_degree;
                        metrics.resamples = Some(out.trace.resamples);
                    }
                    return Ok(ColoringRun {
                        outcome: ColoringOutcome::Colored { coloring },
                        trace: out.trace,
                        report: base_report(g, params, effective_cap, outcome, metrics),
                    });
                }
                Err(failure) => {
                    metrics.s_size = Some(failure.s_pre);
                    metrics.attempts = Some(attempt + 1);
                    trace = failure.trace;
                    let _ = failure.error;
                }
            }
        }
        trace.phase_taken = Phase::FallbackGlobal;
    }

    match fallback_global(g, &matching) {
        Ok(coloring) => {
            debug_assert!(verify_coloring(g, &coloring));
            metrics.palette_size = Some(coloring.palette_size);
            Ok(ColoringRun {
                outcome: ColoringOutcome::Colored { coloring },
                trace,
                report: base_report(
                    g,
                    params,
                    effective_cap,
                    Outcome::FallbackGlobal,
                    metrics,
                ),
            })
        }
        Err(reason) => Ok(ColoringRun {
            outcome: ColoringOutcome::Failure {
                reason: reason.clone(),
            },
            trace,
            report: base_report(g, params, effective_cap, Outcome::Failure, metrics),
        }),
    }
}

fn base_report(
    g: &BipartiteGraph,
    params: &ColoringParams,
    effective_cap: Option<u64>,
    outcome: Outcome,
    metrics: TrialMetrics,
) -> TrialReport {
    TrialReport {
        algorithm: "color".to_string(),
        graph: Some(GraphDescriptor::measure(g, None)),
        params: ParamRecord {
            epsilon: Some(params.epsilon),
            seed: Some(params.seed.0),
            retries: Some(params.retries),
            resample_cap: effective_cap.or(params.resample_cap),
        },
        outcome,
        metrics,
        wall_time_ms: None,
    }
}

/// Summary statistics from repeated coupon-collector experiments: draw
/// uniformly from `q` coupons until all are seen, `trials` times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouponStats {
    pub q: usize,
    /// The draw budget whose success probability `p_hat` estimates.
    pub delta: usize,
    pub trials: u64,
    /// Fraction of trials that collected every coupon within `delta` draws.
    pub p_hat: f64,
    /// Mean number of draws to complete a collection.
    pub mean_t: f64,
    /// Sample variance of that count (0 when `trials == 1`).
    pub var_t: f64,
}

/// Simulate the coupon collector: for each trial, count uniform draws from
/// `0..q` until every value has appeared.
pub fn coupon_sim(q: usize, delta: usize, trials: u64, seed: Seed) -> CouponStats {
    assert!(q > 0, "need at least one coupon");
    assert!(trials > 0, "need at least one trial");
    let mut rng = seed.rng();
    let mut stamp = vec![0u64; q];
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut hits = 0u64;
    for trial in 1..=trials {
        let mut covered = 0usize;
        let mut draws = 0u64;
        while covered < q {
            let c = rng.below(q);
            draws += 1;
            if stamp[c] != trial {
                stamp[c] = trial;
                covered += 1;
            }
        }
        if draws <= delta as u64 {
            hits += 1;
        }
        sum += draws as f64;
        sum_sq += (draws * draws) as f64;
    }
    let nf = trials as f64;
    let mean_t = sum / nf;
    let var_t = if trials > 1 {
        ((sum_sq - nf * mean_t * mean_t) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    CouponStats {
        q,
        delta,
        trials,
        p_hat: hits as f64 / nf,
        mean_t,
        var_t,
    }
}
