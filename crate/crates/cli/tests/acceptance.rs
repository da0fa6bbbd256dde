//! Acceptance gate: ten numbered criteria, one test each, every test
//! printing a single `criterion N: PASS/FAIL — detail` line (visible with
//! `--nocapture`, and always on failure). Desk scale means n = 20000 with
//! average degree 64 unless a criterion says otherwise.
//!
//! Criterion 5 is expected to fail at desk scale: the residual-selection
//! phase needs candidate classes larger than its per-class floor, and at
//! max degree 64 the floor exceeds the expected candidate count for every
//! epsilon the palette bound tolerates (the margin ratio only crosses 1
//! beyond max degree ≈ 387). The test states the bound as specified and
//! reports the honest result rather than weakening the check.

use std::collections::HashSet;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use bihole_lab::bihole::{find_bihole, verify_bihole, BiholeParams};
use bihole_lab::coloring::{
    color_balanced, coupon_sim, lemma_easy_color, phase1_color_u, verify_coloring,
    ColoringOutcome, ColoringParams, ColoringRun,
};
use bihole_lab::gen::{cap_max_degree, complete, empty, gnnp};
use bihole_lab::harness::{bihole_suite, BiholeSuiteConfig};
use bihole_lab::oracle::{chi_b_exact, max_bihole_exact, max_matching_exact};
use bihole_lab::report::Outcome;
use bihole_lab::rng::Seed;
use bihole_lab::BipartiteGraph;

fn verdict(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_01_bihole_soundness_sweep() {
    let started = Instant::now();
    let probs = [0.05, 0.2, 0.5];
    let mut verified = 0usize;
    for i in 0..1000u64 {
        let n = 4 + (i as usize * 97) % 197; // covers [4, 200]
        let p = probs[i as usize % probs.len()];
        let g = gnnp(n, p, Seed(1000 + i));
        let params = BiholeParams {
            epsilon: 0.5,
            retries: 1,
            seed: Seed(2000 + i),
        };
        let (hole, _) = find_bihole(&g, &params).expect("valid instance");
        if verify_bihole(&g, &hole).expect("indices in range") {
            verified += 1;
        }
    }
    let elapsed = started.elapsed();
    let pass = verified == 1000 && elapsed.as_secs_f64() < 30.0;
    verdict(
        1,
        pass,
        &format!("{verified}/1000 outputs verified in {:.1}s (need all, < 30s)", elapsed.as_secs_f64()),
    );
    assert!(pass);
}

#[test]
fn criterion_02_bihole_size_at_desk_scale() {
    let run = bihole_suite(&BiholeSuiteConfig {
        n: 20000,
        delta: 64.0,
        epsilon: 0.5,
        retries: 3,
        seeds: 10,
        base_seed: Seed(0),
    });
    let bound = 650;
    let hits = run
        .summary
        .reports
        .iter()
        .filter(|r| r.metrics.t.is_some_and(|t| t >= bound))
        .count();
    let mean_ms = run
        .summary
        .reports
        .iter()
        .filter_map(|r| r.wall_time_ms)
        .sum::<u64>() as f64
        / 10.0;
    let pass = hits >= 9 && mean_ms < 5000.0;
    verdict(
        2,
        pass,
        &format!("{hits}/10 seeds reached t >= {bound}, mean trial {mean_ms:.0}ms (need >= 9, < 5s)"),
    );
    assert!(pass);
}

#[test]
fn criterion_03_class_sizes_within_loose_bound() {
    let n = 20000usize;
    let q = 20usize;
    // List coloring assigns left classes independently of edges; an edgeless
    // graph of the right size exercises the identical code path.
    let g = empty(n);
    let slack = n as f64 / (n as f64).ln();
    let lo = n as f64 / q as f64 - slack;
    let hi = n as f64 / q as f64 + slack;
    let mut worst: (f64, usize) = (0.0, 0); // (|deviation|, class size)
    let mut ok = true;
    for s in 0..50u64 {
        let colors = phase1_color_u(&g, q, Seed(300).child(s));
        let mut counts = vec![0usize; q];
        for &c in &colors {
            counts[c] += 1;
        }
        for &count in &counts {
            let dev = (count as f64 - n as f64 / q as f64).abs();
            if dev > worst.0 {
                worst = (dev, count);
            }
            if (count as f64) < lo || (count as f64) > hi {
                ok = false;
            }
        }
    }
    verdict(
        3,
        ok,
        &format!(
            "50 seeds, all class sizes within [{lo:.0}, {hi:.0}]; extreme class had {} vertices",
            worst.1
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_04_coloring_soundness_and_infeasibility_agreement() {
    let started = Instant::now();
    let mut colored = 0usize;
    let mut infeasible = 0usize;
    let mut gave_up = 0usize;
    for i in 0..500u64 {
        let n = 1 + (i as usize * 31) % 12; // covers [1, 12]
        let p = [0.1, 0.3, 0.5, 0.7, 0.9][i as usize % 5];
        let g = gnnp(n, p, Seed(40_000 + i));
        let params = ColoringParams {
            epsilon: 0.5,
            seed: Seed(50_000 + i),
            retries: 2,
            resample_cap: None,
        };
        let run = color_balanced(&g, &params).expect("valid instance");
        let feasible = max_matching_exact(&g, true).expect("n <= 12").value == n;
        match run.outcome {
            ColoringOutcome::Colored { ref coloring } => {
                assert!(verify_coloring(&g, coloring), "invalid coloring at i={i}");
                assert!(feasible, "colored an infeasible instance at i={i}");
                colored += 1;
            }
            ColoringOutcome::Infeasible => {
                assert!(!feasible, "called a feasible instance infeasible at i={i}");
                infeasible += 1;
            }
            ColoringOutcome::Failure { .. } => {
                assert!(feasible, "failure must only occur on feasible instances");
                gave_up += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    let pass = elapsed.as_secs_f64() < 60.0;
    verdict(
        4,
        pass,
        &format!(
            "500 instances: {colored} colored (all verified), {infeasible} infeasible \
             (all matching-confirmed), {gave_up} gave up; {:.1}s (< 60s)",
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

/// Ten desk-scale coloring runs shared by criteria 5 and 9: max degree
/// capped to exactly 64 so q = 20 and the residual degree cap is 8.
fn desk_coloring_runs() -> &'static [ColoringRun] {
    static RUNS: OnceLock<Vec<ColoringRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        (0..10u64)
            .map(|i| {
                let trial = Seed(5).child(i);
                let g = cap_max_degree(&gnnp(20000, 64.0 / 20000.0, trial.child(1)), 64);
                let params = ColoringParams {
                    epsilon: 0.5,
                    seed: trial.child(2),
                    retries: 3,
                    resample_cap: None,
                };
                color_balanced(&g, &params).expect("valid desk instance")
            })
            .collect()
    })
}

#[test]
fn criterion_05_palette_accounting_at_desk_scale() {
    let palette_bound = 38; // q + 1 + (2 d* + 1) with q = 20, d* = 8
    let fallback_bound = 129; // 2 * 64 + 1
    let runs = desk_coloring_runs();
    let mut pipeline_hits = 0usize;
    let mut fallback_ok = 0usize;
    let mut palettes = Vec::new();
    for run in runs {
        let Some(coloring) = run.outcome.coloring() else {
            continue;
        };
        palettes.push(coloring.palette_size);
        match run.report.outcome {
            Outcome::SmallS | Outcome::LargeS
                if coloring.palette_size <= palette_bound =>
            {
                pipeline_hits += 1;
            }
            Outcome::FallbackGlobal if coloring.palette_size <= fallback_bound => {
                fallback_ok += 1;
            }
            _ => {}
        }
    }
    let pass = pipeline_hits >= 8 && pipeline_hits + fallback_ok == runs.len();
    verdict(
        5,
        pass,
        &format!(
            "{pipeline_hits}/10 pipeline runs within the {palette_bound}-color bound, \
             {fallback_ok} fell back (bound {fallback_bound}); palettes {palettes:?}. \
             At max degree 64 the residual-selection floor exceeds the expected \
             candidate count for any epsilon the bound tolerates, so the listed \
             bound is unreachable until max degree ≈ 387; recorded as a known red."
        ),
    );
    assert!(
        pass,
        "pipeline met the {palette_bound}-color bound in {pipeline_hits}/10 runs (need 8)"
    );
}

#[test]
fn criterion_06_easy_coloring_lemma_property() {
    let started = Instant::now();
    let mut max_palette = 0usize;
    for i in 0..200u64 {
        let d = 1 + (i as usize) % 5;
        let n = 2 * d + 3;
        let g = cap_max_degree(&gnnp(n, d as f64 / n as f64, Seed(60_000 + i)), d);
        let coloring = lemma_easy_color(&g, 0)
            .unwrap_or_else(|e| panic!("lemma failed on instance {i}: {e}"));
        assert!(verify_coloring(&g, &coloring), "invalid coloring at i={i}");
        let bound = 2 * g.max_degree() + 1;
        assert!(
            coloring.palette_size <= bound,
            "palette {} exceeds {bound} at i={i}",
            coloring.palette_size
        );
        max_palette = max_palette.max(coloring.palette_size);
    }
    let elapsed = started.elapsed();
    let pass = elapsed.as_secs_f64() < 5.0;
    verdict(
        6,
        pass,
        &format!(
            "200/200 succeeded within 2*max_degree+1 colors (largest palette {max_palette}); \
             {:.2}s (< 5s)",
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_oracle_equivalence() {
    let started = Instant::now();
    // Randomized search never beats exhaustive search.
    for i in 0..200u64 {
        let n = 1 + (i as usize) % 6;
        let p = [0.1, 0.3, 0.5, 0.7][i as usize % 4];
        let g = gnnp(n, p, Seed(70_000 + i));
        let params = BiholeParams {
            epsilon: 0.5,
            retries: 2,
            seed: Seed(71_000 + i),
        };
        let (hole, _) = find_bihole(&g, &params).expect("valid instance");
        let best = max_bihole_exact(&g).expect("n <= 6").value;
        assert!(
            hole.size() <= best,
            "found {} but optimum is {best} at i={i}",
            hole.size()
        );
    }
    // Equality on the two extreme families.
    for k in 1..=6usize {
        for (g, label) in [(empty(k), "empty"), (complete(k), "complete")] {
            let params = BiholeParams {
                epsilon: 0.5,
                retries: 2,
                seed: Seed(72_000 + k as u64),
            };
            let (hole, _) = find_bihole(&g, &params).expect("valid instance");
            let best = max_bihole_exact(&g).expect("n <= 6").value;
            assert_eq!(hole.size(), best, "{label}({k}) not matched exactly");
        }
    }
    // The pipeline's palette can never undercut the exact class minimum.
    let mut compared = 0usize;
    for i in 0..100u64 {
        let n = 1 + (i as usize) % 4;
        let p = [0.2, 0.5, 0.8][i as usize % 3];
        let g = gnnp(n, p, Seed(73_000 + i));
        let params = ColoringParams {
            epsilon: 0.5,
            seed: Seed(74_000 + i),
            retries: 2,
            resample_cap: None,
        };
        let run = color_balanced(&g, &params).expect("valid instance");
        let (Some(coloring), Ok(exact)) = (run.outcome.coloring(), chi_b_exact(&g)) else {
            continue;
        };
        assert!(
            coloring.palette_size >= exact.value,
            "palette {} beats exact minimum {} at i={i}",
            coloring.palette_size,
            exact.value
        );
        compared += 1;
    }
    let elapsed = started.elapsed();
    let pass = elapsed.as_secs_f64() < 60.0;
    verdict(
        7,
        pass,
        &format!(
            "200 bi-hole instances never beat the oracle (equality on 12 extreme graphs); \
             {compared}/100 colorings compared against the exact minimum; {:.1}s (< 60s)",
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

/// d-regular bipartite graph whose left u is joined to rights u + o (mod n)
/// for each offset o in a greedily built Sidon set (all pairwise
/// differences distinct, all elements below n/2 so no wraparound collides).
fn sidon_regular(n: usize, d: usize) -> BipartiteGraph {
    let mut offsets: Vec<usize> = Vec::with_capacity(d);
    let mut diff_used = vec![false; n];
    let mut candidate = 0usize;
    while offsets.len() < d {
        let fresh = offsets.iter().all(|&o| !diff_used[candidate - o]);
        if fresh {
            for &o in &offsets {
                diff_used[candidate - o] = true;
            }
            offsets.push(candidate);
        }
        candidate += 1;
    }
    let spread = *offsets.last().unwrap();
    assert!(spread < n / 2, "Sidon offsets span {spread}, too wide for side {n}");
    let mut edges = Vec::with_capacity(n * d);
    for u in 0..n {
        for &o in &offsets {
            edges.push((u, (u + o) % n));
        }
    }
    BipartiteGraph::build(n, n, &edges).unwrap()
}

#[test]
fn criterion_08_coupon_collector_links_phase_two() {
    // Analytic anchors for the collection time itself.
    let two = coupon_sim(2, 64, 100_000, Seed(81));
    let mean_two_ok = (two.mean_t - 3.0).abs() <= 0.05 * 3.0;
    let twenty = coupon_sim(20, 64, 100_000, Seed(82));
    let mean_floor = 0.95 * 20.0 * (20.0f64).ln();
    let twenty_ok = twenty.var_t < 800.0 && twenty.mean_t >= mean_floor;

    // On an exactly 64-regular instance every right vertex sees 64
    // independent uniform draws over 20 colors, so the fraction left
    // uncolored after list coloring estimates the same probability as the
    // simulated collection times. Offsets form a Sidon set so any two
    // right vertices share at most one neighbor: sharing a single draw
    // leaves the cover indicators uncorrelated (colors are exchangeable),
    // which keeps the per-run spread of |S|/n near binomial. Consecutive
    // offsets would instead give adjacent rights 63 common neighbors and
    // inflate the spread past the tolerance.
    let p_hat = twenty.p_hat;
    let n = 20000usize;
    let g = sidon_regular(n, 64);
    let mut fractions = Vec::new();
    for i in 0..20u64 {
        let params = ColoringParams {
            epsilon: 0.5,
            seed: Seed(88).child(i),
            retries: 0,
            resample_cap: None,
        };
        let run = color_balanced(&g, &params).expect("valid instance");
        assert_eq!(run.trace.q, 20, "regular instance must set q = 20");
        let s = run.report.metrics.s_size.expect("pipeline records |S|");
        fractions.push(s as f64 / n as f64);
    }
    let max_dev = fractions
        .iter()
        .map(|f| (f - p_hat).abs())
        .fold(0.0f64, f64::max);
    let fractions_ok = max_dev <= 0.02;

    let pass = mean_two_ok && twenty_ok && fractions_ok;
    verdict(
        8,
        pass,
        &format!(
            "q=2 mean {:.4} (within 5% of 3: {mean_two_ok}); q=20 mean {:.2} >= {mean_floor:.2}, \
             var {:.1} < 800; 20 regular-instance runs: |S|/n vs p_hat {p_hat:.4} deviates \
             at most {max_dev:.4} (<= 0.02)",
            two.mean_t, twenty.mean_t, twenty.var_t
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_residual_degree_bound() {
    // Desk-scale runs as specified; the residual-selection path is also
    // exercised on a hub instance (isolated vertices plus one 30-regular
    // block) where it is known to succeed, so the bound is checked on at
    // least one non-vacuous run.
    let d_star_desk = 8; // ceil(64 / ln(64)^1.5)
    let mut checked = 0usize;
    for run in desk_coloring_runs() {
        if run.report.outcome != Outcome::LargeS {
            continue;
        }
        let residual = run
            .report
            .metrics
            .residual_max_degree
            .expect("residual-selection runs record their max degree");
        assert!(residual <= d_star_desk, "residual degree {residual} > {d_star_desk}");
        checked += 1;
    }

    let hub = {
        let n = 8000;
        let block = 200;
        let d = 30;
        let base = n - block;
        let mut edges = Vec::with_capacity(block * d);
        for i in 0..block {
            for j in 0..d {
                edges.push((base + i, base + (i + j) % block));
            }
        }
        BipartiteGraph::build(n, n, &edges).unwrap()
    };
    let params = ColoringParams {
        epsilon: 0.1,
        seed: Seed(5),
        retries: 5,
        resample_cap: None,
    };
    let run = color_balanced(&hub, &params).expect("valid instance");
    assert_eq!(run.report.outcome, Outcome::LargeS, "hub run must select a residual set");
    let d_star_hub = 5; // ceil(30 / ln(30)^1.5)
    let residual = run.report.metrics.residual_max_degree.unwrap();
    // Recompute the degree bound directly on the output rather than
    // trusting the recorded metric.
    let selected: HashSet<usize> = run.trace.selected_su.iter().copied().collect();
    let direct = run
        .trace
        .uncolored_s
        .iter()
        .map(|&v| {
            hub.neighbors_of_right(v)
                .iter()
                .filter(|u| selected.contains(u))
                .count()
        })
        .max()
        .unwrap_or(0);
    let pass = residual <= d_star_hub && direct == residual;
    verdict(
        9,
        pass,
        &format!(
            "{checked}/10 desk runs took the residual path (bound {d_star_desk} held on all); \
             hub run residual degree {residual} <= {d_star_hub}, recomputed {direct}"
        ),
    );
    assert!(pass);
}

// --- criterion 10: byte-identical stdout, pinned by golden files ---

struct GoldenCase {
    name: &'static str,
    args: &'static [&'static str],
}

const GOLDEN_CASES: &[GoldenCase] = &[
    GoldenCase {
        name: "gen",
        args: &["gen", "--n", "8", "--p", "0.25", "--seed", "7", "--out", "OUTFILE"],
    },
    GoldenCase {
        name: "find_bihole",
        args: &[
            "find-bihole",
            "--input",
            "tests/fixtures/rand200.txt",
            "--epsilon",
            "0.5",
            "--seed",
            "7",
            "--emit-witness",
        ],
    },
    GoldenCase {
        name: "color",
        args: &[
            "color",
            "--input",
            "tests/fixtures/rand200.txt",
            "--epsilon",
            "0.5",
            "--seed",
            "11",
            "--retries",
            "2",
        ],
    },
    GoldenCase {
        name: "oracle_chib",
        args: &["oracle", "--input", "tests/fixtures/pm4.txt", "--mode", "chib"],
    },
    GoldenCase {
        name: "bench_coupon",
        args: &[
            "bench",
            "--suite",
            "coupon",
            "--q",
            "3",
            "--trials",
            "5000",
            "--seeds",
            "2",
            "--seed",
            "9",
        ],
    },
];

fn run_case(case: &GoldenCase, scratch: &Path) -> Vec<u8> {
    let out_file = scratch.join(format!("{}.txt", case.name));
    let args: Vec<String> = case
        .args
        .iter()
        .map(|a| {
            if *a == "OUTFILE" {
                out_file.display().to_string()
            } else {
                (*a).to_string()
            }
        })
        .collect();
    let output = Command::new(env!("CARGO_BIN_EXE_bihole-lab"))
        .args(&args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env_remove("BIHOLE_LAB_THREADS")
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "{} exited with {:?}: {}",
        case.name,
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    output.stdout
}

#[test]
fn criterion_10_stdout_determinism_golden_files() {
    let scratch = tempfile::tempdir().expect("temp dir");
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let regen = std::env::var_os("GOLDEN_REGEN").is_some();
    let mut checked = 0usize;
    for case in GOLDEN_CASES {
        let first = run_case(case, scratch.path());
        let second = run_case(case, scratch.path());
        assert_eq!(
            first, second,
            "{}: repeated invocation changed stdout",
            case.name
        );
        let golden_path = golden_dir.join(format!("{}.stdout", case.name));
        if regen {
            std::fs::write(&golden_path, &first).expect("write golden");
        } else {
            let expected = std::fs::read(&golden_path)
                .unwrap_or_else(|e| panic!("{}: missing golden file: {e}", case.name));
            assert_eq!(
                first,
                expected,
                "{}: stdout diverged from the pinned golden bytes",
                case.name
            );
        }
        checked += 1;
    }
    verdict(
        10,
        true,
        &format!(
            "{checked}/5 commands byte-identical across repeated runs and matching their \
             pinned golden stdout{}",
            if regen { " (regenerated)" } else { "" }
        ),
    );
}
