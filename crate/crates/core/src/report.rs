//! Structured experiment reports.
//!
//! Every single-run command emits one `TrialReport` as one JSON object;
//! bench suites emit a `BenchSummary` whose aggregate is recomputable from
//! its per-trial rows. Optional fields are populated exactly when the
//! corresponding phase ran, and serialization skips absent fields so the
//! JSON stays stable and diff-friendly. Wall-clock time is deliberately
//! kept out of the stdout path by leaving `wall_time_ms` unset there —
//! identical inputs must produce byte-identical reports; timing lives in
//! stderr summaries and CSV exports.

use serde::{Deserialize, Serialize};

use crate::graph::BipartiteGraph;

/// How a trial's input graph looked, plus where it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDescriptor {
    pub left_count: usize,
    pub right_count: usize,
    pub edge_count: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    /// Provenance: a generator expression like `gnnp(n=8,p=0.25,seed=7)` or
    /// an input file path. Absent for graphs built in memory by a caller.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub source: Option<String>,
}

impl GraphDescriptor {
    pub fn measure(g: &BipartiteGraph, source: Option<String>) -> Self {
        let avg_degree = if g.left_count() == 0 {
            0.0
        } else {
            g.edge_count() as f64 / g.left_count() as f64
        };
        GraphDescriptor {
            left_count: g.left_count(),
            right_count: g.right_count(),
            edge_count: g.edge_count(),
            avg_degree,
            max_degree: g.max_degree(),
            source,
        }
    }
}

/// The knobs a trial ran with; fields are set when meaningful for the
/// algorithm in question.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct ParamRecord {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub retries: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub resample_cap: Option<u64>,
}

/// What a trial concluded. Bi-hole runs report the target check; coloring
/// runs report the pipeline path that produced the final coloring, or the
/// reason there is none.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    TargetMet,
    TargetMissed,
    SmallS,
    LargeS,
    FallbackGlobal,
    Infeasible,
    Failure,
}

impl Outcome {
    /// Whether this outcome counts as a success for bench aggregation.
    /// `Infeasible` is a correct answer, not a success of the randomized
    /// pipeline, and is counted separately by suites that expect it.
    pub fn is_success(self) -> bool {
        !matches!(self, Outcome::TargetMissed | Outcome::Failure | Outcome::Infeasible)
    }
}

/// Per-trial measurements; each field is present exactly when the phase
/// that produces it executed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct TrialMetrics {
    /// Bi-hole size found.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<usize>,
    /// Bi-hole size the run was aiming for.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target: Option<usize>,
    /// |U'| before balancing (sampled left side).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub u_prime: Option<usize>,
    /// |V'| before balancing (rights with no sampled neighbor).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub v_prime: Option<usize>,
    /// True when trimming removed at least a quarter of each side.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trim_flagged: Option<bool>,
    /// Attempts consumed (1 = first try succeeded or no retry allowed).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub attempts: Option<u32>,
    /// Number of distinct colors in the returned coloring.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub palette_size: Option<usize>,
    /// Primary palette size q.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<usize>,
    /// Right vertices still uncolored right after list coloring (before the
    /// equalization step removes any extras): the count whose per-vertex
    /// probability the coupon-collector simulation estimates.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s_size: Option<usize>,
    /// Max degree of the induced residual graph handed to the closing step.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual_max_degree: Option<usize>,
    /// Resampling steps performed by the residual selection.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub resamples: Option<u64>,
    /// Coupon simulation: empirical P[T <= delta].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_hat: Option<f64>,
    /// Coupon simulation: empirical mean of T.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_t: Option<f64>,
    /// Coupon simulation: empirical variance of T.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub var_t: Option<f64>,
}

/// One experiment trial, serialized as a single JSON line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    /// Algorithm id: `find-bihole`, `color`, or `coupon`.
    pub algorithm: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub graph: Option<GraphDescriptor>,
    pub params: ParamRecord,
    pub outcome: Outcome,
    pub metrics: TrialMetrics,
    /// Unset on stdout (determinism); populated for CSV export.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<u64>,
}

/// Order statistics over a chosen per-trial metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub successes: usize,
    pub success_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min: Option<usize>,
    /// Lower median (element at index (k-1)/2 of the sorted values).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub median: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max: Option<usize>,
}

/// A bench suite's full output: the per-trial rows plus an aggregate that
/// any consumer can recompute from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub suite: String,
    pub reports: Vec<TrialReport>,
    pub aggregate: Aggregate,
}

impl BenchSummary {
    /// Aggregate `reports`, counting successes via [`Outcome::is_success`]
    /// and taking order statistics of whichever size metric the suite
    /// tracks (`t` for bi-hole suites, `palette_size` for coloring ones).
    pub fn new(suite: &str, reports: Vec<TrialReport>) -> Self {
        let successes = reports.iter().filter(|r| r.outcome.is_success()).count();
        let mut values: Vec<usize> = reports
            .iter()
            .filter_map(|r| r.metrics.t.or(r.metrics.palette_size))
            .collect();
        values.sort_unstable();
        let aggregate = Aggregate {
            trials: reports.len(),
            successes,
            success_fraction: if reports.is_empty() {
                0.0
            } else {
                successes as f64 / reports.len() as f64
            },
            min: values.first().copied(),
            median: if values.is_empty() { None } else { Some(values[(values.len() - 1) / 2]) },
            max: values.last().copied(),
        };
        BenchSummary { suite: suite.to_string(), reports, aggregate }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::rng::Seed;

    fn sample_report(t: usize, met: bool) -> TrialReport {
        TrialReport {
            algorithm: "find-bihole".into(),
            graph: Some(GraphDescriptor::measure(
                &gen::gnnp(8, 0.25, Seed(7)),
                Some("gnnp(n=8,p=0.25,seed=7)".into()),
            )),
            params: ParamRecord {
                epsilon: Some(0.5),
                seed: Some(7),
                retries: Some(3),
                ..ParamRecord::default()
            },
            outcome: if met { Outcome::TargetMet } else { Outcome::TargetMissed },
            metrics: TrialMetrics {
                t: Some(t),
                target: Some(2),
                u_prime: Some(t + 1),
                v_prime: Some(t),
                trim_flagged: Some(false),
                attempts: Some(1),
                ..TrialMetrics::default()
            },
            wall_time_ms: None,
        }
    }

    #[test]
    fn report_round_trips_through_json() {
        let r = sample_report(3, true);
        let line = serde_json::to_string(&r).unwrap();
        let back: TrialReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
        // Absent optionals must not appear as nulls.
        assert!(!line.contains("null"), "{line}");
        assert!(!line.contains("wall_time_ms"));
        assert!(!line.contains("palette_size"));
    }

    #[test]
    fn outcome_serializes_snake_case() {
        assert_eq!(serde_json::to_string(&Outcome::TargetMet).unwrap(), "\"target_met\"");
        assert_eq!(
            serde_json::to_string(&Outcome::FallbackGlobal).unwrap(),
            "\"fallback_global\""
        );
        let back: Outcome = serde_json::from_str("\"large_s\"").unwrap();
        assert_eq!(back, Outcome::LargeS);
    }

    #[test]
    fn aggregate_is_recomputable_from_rows() {
        let summary = BenchSummary::new(
            "bihole",
            vec![sample_report(5, true), sample_report(1, false), sample_report(4, true)],
        );
        assert_eq!(summary.aggregate.trials, 3);
        assert_eq!(summary.aggregate.successes, 2);
        assert!((summary.aggregate.success_fraction - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(summary.aggregate.min, Some(1));
        assert_eq!(summary.aggregate.median, Some(4));
        assert_eq!(summary.aggregate.max, Some(5));

        // Recompute from the serialized rows and compare.
        let json = serde_json::to_string(&summary).unwrap();
        let back: BenchSummary = serde_json::from_str(&json).unwrap();
        let recomputed = BenchSummary::new(&back.suite, back.reports.clone());
        assert_eq!(recomputed.aggregate, summary.aggregate);
    }

    #[test]
    fn infeasible_is_an_answer_but_not_a_success() {
        assert!(!Outcome::Infeasible.is_success());
        assert!(!Outcome::Failure.is_success());
        assert!(Outcome::SmallS.is_success());
        assert!(Outcome::FallbackGlobal.is_success());
    }

    #[test]
    fn descriptor_measures_degenerate_graphs() {
        let d = GraphDescriptor::measure(&gen::empty(0), None);
        assert_eq!(d.avg_degree, 0.0);
        assert_eq!(d.max_degree, 0);
        let d = GraphDescriptor::measure(&gen::complete(4), None);
        assert_eq!(d.avg_degree, 4.0);
        assert_eq!(d.edge_count, 16);
    }
}
