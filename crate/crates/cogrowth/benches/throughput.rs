//! Compares the data-parallel execution paths against their sequential
//! twins: tempering ladders (chains advance concurrently between swap
//! barriers) and the brute-force reduced-word walk (split by first
//! letter). Run with `cargo bench`, or `cargo bench --no-default-features`
//! to measure the build without the parallel feature at all.

use cogrowth::bruteforce::{
    count_trivial_words, count_trivial_words_seq, WordProblemOracle,
};
use cogrowth::presentation::bundled;
use cogrowth::tempering::{run_grid, run_grid_sequential, TemperingConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn ladder_config(chains: usize, steps: u64) -> TemperingConfig {
    let betas = (1..=chains).map(|i| 0.28 * i as f64 / chains as f64).collect();
    let mut config = TemperingConfig::new(betas, 1.0, steps);
    config.swap_interval = 1000;
    config.block_count = 10;
    config.seed = 7;
    config
}

fn tempering_ladder(c: &mut Criterion) {
    let p = bundled("z2").unwrap();
    let mut group = c.benchmark_group("tempering_ladder");
    group.sample_size(10);
    for chains in [4usize, 8] {
        let config = ladder_config(chains, 200_000);
        group.bench_with_input(
            BenchmarkId::new("dispatched", chains),
            &config,
            |b, config| b.iter(|| run_grid(&p, config).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", chains),
            &config,
            |b, config| b.iter(|| run_grid_sequential(&p, config).unwrap()),
        );
    }
    group.finish();
}

fn reduced_word_walk(c: &mut Criterion) {
    let p = bundled("z2").unwrap();
    let oracle = WordProblemOracle::FreeAbelian { rank: 2 };
    let mut group = c.benchmark_group("reduced_word_walk");
    group.sample_size(10);
    for max_len in [12usize, 14] {
        group.bench_with_input(
            BenchmarkId::new("dispatched", max_len),
            &max_len,
            |b, &l| b.iter(|| count_trivial_words(&p, &oracle, l).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", max_len),
            &max_len,
            |b, &l| b.iter(|| count_trivial_words_seq(&p, &oracle, l).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, tempering_ladder, reduced_word_walk);
criterion_main!(benches);
