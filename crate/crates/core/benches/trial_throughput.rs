//! Throughput of multi-seed trial batches: rayon-parallel vs sequential.
//! Trials are pure and seed-derived, so both paths produce identical
//! reports; the interesting number is the wall-clock ratio on multicore
//! hosts.

use bihole_lab::bihole::{find_bihole, BiholeParams};
use bihole_lab::coloring::{color_balanced, ColoringParams};
use bihole_lab::gen;
use bihole_lab::harness::{run_trials, run_trials_seq};
use bihole_lab::rng::Seed;
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn color_trial(i: u64) -> usize {
    let trial = Seed(1234).child(i);
    let g = gen::gnnp(120, 6.0 / 120.0, trial.child(1));
    let params = ColoringParams {
        epsilon: 0.5,
        seed: trial.child(2),
        retries: 2,
        resample_cap: None,
    };
    let run = color_balanced(&g, &params).expect("square random graphs are valid input");
    run.outcome.coloring().map_or(0, |c| c.palette_size)
}

fn bihole_trial(i: u64) -> usize {
    let trial = Seed(987).child(i);
    let g = gen::gnnp(400, 12.0 / 400.0, trial.child(1));
    let params = BiholeParams {
        epsilon: 0.5,
        retries: 1,
        seed: trial.child(2),
    };
    let (hole, _) = find_bihole(&g, &params).expect("square random graphs are valid input");
    hole.size()
}

fn bench_trial_batches(c: &mut Criterion) {
    let mut group = c.benchmark_group("color_batch_16");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(run_trials(16, color_trial)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(run_trials_seq(16, color_trial)))
    });
    group.finish();

    let mut group = c.benchmark_group("bihole_batch_16");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(run_trials(16, bihole_trial)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(run_trials_seq(16, bihole_trial)))
    });
    group.finish();
}

criterion_group!(benches, bench_trial_batches);
criterion_main!(benches);
