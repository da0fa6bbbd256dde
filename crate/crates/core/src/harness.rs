//! Multi-seed experiment driver: run independent trials (in parallel when
//! the `parallel` feature is enabled), time them, aggregate them into a
//! [`BenchSummary`], and judge the batch against each suite's declared
//! threshold.
//!
//! Trial `i` of a suite derives everything from `base_seed.child(i)`: the
//! instance from its child stream 1, the algorithm from child stream 2.
//! Reports therefore do not depend on thread count or scheduling, only on
//! the seeds; wall times are the one nondeterministic field, and
//! [`strip_wall_times`] removes them for byte-stable output.

use std::time::Instant;

use crate::bihole::{find_bihole, BiholeParams};
use crate::coloring::{color_balanced, coupon_sim, verify_coloring, ColoringParams};
use crate::gen;
use crate::report::{BenchSummary, Outcome, ParamRecord, TrialMetrics, TrialReport};
use crate::rng::Seed;

/// Minimum fraction of trials that must meet the bi-hole target for the
/// bi-hole suite to pass.
pub const BIHOLE_SUITE_MIN_SUCCESS: f64 = 0.9;
/// Relative tolerance on the coupon suite's mean against the analytic value.
pub const COUPON_MEAN_TOLERANCE: f64 = 0.05;

/// Map each trial index to a result, in index order. Runs on the rayon pool
/// when the `parallel` feature is enabled, sequentially otherwise; the
/// output is identical either way.
pub fn run_trials<T, F>(trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_trials_seq(trials, f)
    }
}

/// Sequential twin of [`run_trials`], available under every feature set.
pub fn run_trials_seq<T, F>(trials: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..trials).map(f).collect()
}

/// A suite's reports plus the verdict against its threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRun {
    pub summary: BenchSummary,
    pub passed: bool,
    /// One human-readable sentence explaining the verdict.
    pub detail: String,
}

/// Blank out every `wall_time_ms` so two runs of the same suite serialize
/// identically.
pub fn strip_wall_times(summary: &mut BenchSummary) {
    for report in &mut summary.reports {
        report.wall_time_ms = None;
    }
}

/// Cap trial concurrency at `threads` workers for the rest of the process.
/// A no-op in sequential builds. Fails if a pool was already configured.
pub fn configure_thread_cap(threads: usize) -> Result<(), String> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BiholeSuiteConfig {
    pub n: usize,
    /// Expected average degree; each trial draws edges with p = delta / n.
    pub delta: f64,
    pub epsilon: f64,
    pub retries: u32,
    pub seeds: u64,
    pub base_seed: Seed,
}

/// Random-graph bi-hole suite: one graph and one search per seed. Passes
/// when at least [`BIHOLE_SUITE_MIN_SUCCESS`] of the trials meet their size
/// target.
pub fn bihole_suite(cfg: &BiholeSuiteConfig) -> SuiteRun {
    assert!(cfg.seeds > 0, "suite needs at least one seed");
    let reports = run_trials(cfg.seeds, |i| {
        let trial = cfg.base_seed.child(i);
        let started = Instant::now();
        let g = gen::gnnp(cfg.n, edge_probability(cfg.delta, cfg.n), trial.child(1));
        let params = BiholeParams {
            epsilon: cfg.epsilon,
            retries: cfg.retries,
            seed: trial.child(2),
        };
        let mut report = match find_bihole(&g, &params) {
            Ok((_, report)) => report,
            Err(e) => failure_report("find-bihole", &params.seed, e),
        };
        report.wall_time_ms = Some(started.elapsed().as_millis() as u64);
        report
    });
    let summary = BenchSummary::new("bihole", reports);
    let passed = summary.aggregate.success_fraction >= BIHOLE_SUITE_MIN_SUCCESS;
    let detail = format!(
        "{}/{} trials met their bi-hole target (pass needs a fraction >= {BIHOLE_SUITE_MIN_SUCCESS})",
        summary.aggregate.successes, summary.aggregate.trials
    );
    SuiteRun { summary, passed, detail }
}

#[derive(Clone, Copy, Debug)]
pub struct ColorSuiteConfig {
    pub n: usize,
    /// Expected average degree; each trial draws edges with p = delta / n.
    pub delta: f64,
    pub epsilon: f64,
    pub retries: u32,
    pub resample_cap: Option<u64>,
    pub seeds: u64,
    pub base_seed: Seed,
}

/// Random-graph coloring suite. Passes when every returned coloring
/// verifies; infeasible answers are fine, and failures are recorded without
/// aborting the batch.
pub fn color_suite(cfg: &ColorSuiteConfig) -> SuiteRun {
    assert!(cfg.seeds > 0, "suite needs at least one seed");
    let rows = run_trials(cfg.seeds, |i| {
        let trial = cfg.base_seed.child(i);
        let started = Instant::now();
        let g = gen::gnnp(cfg.n, edge_probability(cfg.delta, cfg.n), trial.child(1));
        let params = ColoringParams {
            epsilon: cfg.epsilon,
            seed: trial.child(2),
            retries: cfg.retries,
            resample_cap: cfg.resample_cap,
        };
        let (mut report, verified) = match color_balanced(&g, &params) {
            Ok(run) => {
                let verified = run
                    .outcome
                    .coloring()
                    .map(|c| verify_coloring(&g, c));
                (run.report, verified)
            }
            Err(e) => (failure_report("color", &params.seed, e), None),
        };
        report.wall_time_ms = Some(started.elapsed().as_millis() as u64);
        (report, verified)
    });
    let colored = rows.iter().filter(|(_, v)| v.is_some()).count();
    let sound = rows.iter().filter(|(_, v)| *v == Some(true)).count();
    let reports = rows.into_iter().map(|(r, _)| r).collect();
    let summary = BenchSummary::new("color", reports);
    let passed = sound == colored;
    let detail = format!(
        "{colored} colorings returned across {} trials; {sound} verified (pass needs all)",
        summary.aggregate.trials
    );
    SuiteRun { summary, passed, detail }
}

#[derive(Clone, Copy, Debug)]
pub struct CouponSuiteConfig {
    pub q: usize,
    /// Draw budget whose hit probability each trial estimates.
    pub delta: usize,
    /// Collections simulated per seed.
    pub trials: u64,
    pub seeds: u64,
    pub base_seed: Seed,
}

/// Coupon-collector suite: one simulation batch per seed. Passes when every
/// batch lands within [`COUPON_MEAN_TOLERANCE`] of the analytic mean
/// `q * H_q` and keeps its sample variance below `2 * q^2`.
pub fn coupon_suite(cfg: &CouponSuiteConfig) -> SuiteRun {
    assert!(cfg.seeds > 0, "suite needs at least one seed");
    let reports = run_trials(cfg.seeds, |i| {
        coupon_trial(cfg.q, cfg.delta, cfg.trials, cfg.base_seed.child(i))
    });
    let summary = BenchSummary::new("coupon", reports);
    let passed = summary.aggregate.successes == summary.aggregate.trials;
    let detail = format!(
        "{}/{} batches within {:.0}% of the analytic mean {:.2} with variance below {} \
         (pass needs all)",
        summary.aggregate.successes,
        summary.aggregate.trials,
        COUPON_MEAN_TOLERANCE * 100.0,
        expected_collection_mean(cfg.q),
        2 * cfg.q * cfg.q,
    );
    SuiteRun { summary, passed, detail }
}

/// One timed coupon-collector batch as a [`TrialReport`]. The outcome is
/// `target_met` when the empirical mean sits within
/// [`COUPON_MEAN_TOLERANCE`] of `q * H_q` and the sample variance stays
/// below `2 * q^2` — the calibration the suite certifies.
pub fn coupon_trial(q: usize, delta: usize, trials: u64, seed: Seed) -> TrialReport {
    let started = Instant::now();
    let stats = coupon_sim(q, delta, trials, seed);
    let expected = expected_collection_mean(q);
    let on_target = (stats.mean_t - expected).abs() <= COUPON_MEAN_TOLERANCE * expected
        && stats.var_t < 2.0 * (q * q) as f64;
    TrialReport {
        algorithm: "coupon".to_string(),
        graph: None,
        params: ParamRecord {
            epsilon: None,
            seed: Some(seed.0),
            retries: None,
            resample_cap: None,
        },
        outcome: if on_target { Outcome::TargetMet } else { Outcome::TargetMissed },
        metrics: TrialMetrics {
            p_hat: Some(stats.p_hat),
            mean_t: Some(stats.mean_t),
            var_t: Some(stats.var_t),
            ..TrialMetrics::default()
        },
        wall_time_ms: Some(started.elapsed().as_millis() as u64),
    }
}

/// Analytic mean of the complete-collection time: `q * H_q`.
pub fn expected_collection_mean(q: usize) -> f64 {
    (1..=q).map(|k| q as f64 / k as f64).sum()
}

fn edge_probability(delta: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        (delta / n as f64).clamp(0.0, 1.0)
    }
}

/// Record a trial whose algorithm call itself errored; the failure outcome
/// keeps the aggregate honest while the suite continues.
fn failure_report(algorithm: &str, seed: &Seed, _error: crate::error::Error) -> TrialReport {
    TrialReport {
        algorithm: algorithm.to_string(),
        graph: None,
        params: ParamRecord {
            epsilon: None,
            seed: Some(seed.0),
            retries: None,
            resample_cap: None,
        },
        outcome: Outcome::Failure,
        metrics: TrialMetrics::default(),
        wall_time_ms: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_trials_agree() {
        let f = |i: u64| Seed(40).child(i).rng().next_u64();
        assert_eq!(run_trials(64, f), run_trials_seq(64, f));
    }

    #[test]
    fn sparse_bihole_suite_passes() {
        // Average degree well below e: the greedy path wins against a zero
        // target on every seed.
        let cfg = BiholeSuiteConfig {
            n: 60,
            delta: 0.5,
            epsilon: 0.5,
            retries: 1,
            seeds: 5,
            base_seed: Seed(100),
        };
        let run = bihole_suite(&cfg);
        assert!(run.passed, "{}", run.detail);
        assert_eq!(run.summary.aggregate.trials, 5);
        assert_eq!(run.summary.aggregate.successes, 5);
        assert_eq!(run.summary.reports.len(), 5);
        assert!(run.summary.reports.iter().all(|r| r.wall_time_ms.is_some()));
        assert!(run.summary.reports.iter().all(|r| r.algorithm == "find-bihole"));
    }

    #[test]
    fn dense_bihole_suite_fails_threshold() {
        // A complete graph has no nonempty bi-hole but a positive target.
        let cfg = BiholeSuiteConfig {
            n: 20,
            delta: 20.0,
            epsilon: 0.5,
            retries: 0,
            seeds: 3,
            base_seed: Seed(7),
        };
        let run = bihole_suite(&cfg);
        assert!(!run.passed);
        assert_eq!(run.summary.aggregate.successes, 0);
        assert_eq!(run.summary.aggregate.max, Some(0));
    }

    #[test]
    fn color_suite_verifies_everything_it_returns() {
        let cfg = ColorSuiteConfig {
            n: 40,
            delta: 3.0,
            epsilon: 0.5,
            retries: 2,
            resample_cap: None,
            seeds: 6,
            base_seed: Seed(11),
        };
        let run = color_suite(&cfg);
        assert!(run.passed, "{}", run.detail);
        assert_eq!(run.summary.aggregate.trials, 6);
        assert!(run
            .summary
            .reports
            .iter()
            .all(|r| r.algorithm == "color" && r.wall_time_ms.is_some()));
        // Every row carries a phase-style outcome, never a bare failure.
        assert!(run
            .summary
            .reports
            .iter()
            .all(|r| r.outcome != Outcome::Failure));
    }

    #[test]
    fn coupon_suite_matches_analytic_mean() {
        let cfg = CouponSuiteConfig {
            q: 2,
            delta: 3,
            trials: 50000,
            seeds: 2,
            base_seed: Seed(5),
        };
        let run = coupon_suite(&cfg);
        assert!(run.passed, "{}", run.detail);
        for r in &run.summary.reports {
            let mean = r.metrics.mean_t.unwrap();
            assert!((mean - 3.0).abs() < 0.15, "mean {mean}");
            assert!((r.metrics.p_hat.unwrap() - 0.75).abs() < 0.02);
        }
    }

    #[test]
    fn stripped_suites_are_reproducible() {
        let cfg = ColorSuiteConfig {
            n: 30,
            delta: 3.0,
            epsilon: 0.5,
            retries: 1,
            resample_cap: None,
            seeds: 4,
            base_seed: Seed(21),
        };
        let mut a = color_suite(&cfg).summary;
        let mut b = color_suite(&cfg).summary;
        strip_wall_times(&mut a);
        strip_wall_times(&mut b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn expected_mean_matches_harmonic_sum() {
        assert!((expected_collection_mean(1) - 1.0).abs() < 1e-12);
        assert!((expected_collection_mean(2) - 3.0).abs() < 1e-12);
        let h20: f64 = (1..=20).map(|k| 1.0 / k as f64).sum();
        assert!((expected_collection_mean(20) - 20.0 * h20).abs() < 1e-9);
    }
}
