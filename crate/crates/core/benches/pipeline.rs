use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use cvlbi::estimate::{crb_experiment_with, sample_statistics_with};
use cvlbi::fisher::fisher_monte_carlo_with;
use cvlbi::{Execution, InterferometerConfig};

fn policies() -> Vec<(&'static str, Execution)> {
    vec![
        ("sequential", Execution::Sequential),
        #[cfg(feature = "parallel")]
        ("parallel", Execution::Parallel),
    ]
}

fn config() -> InterferometerConfig {
    InterferometerConfig::from_params(0.1, 0.3, 0.2, 1.0, 0.0).unwrap()
}

fn monte_carlo_fisher(c: &mut Criterion) {
    let cfg = config();
    let mut group = c.benchmark_group("fisher_monte_carlo");
    for (name, exec) in policies() {
        group.bench_with_input(BenchmarkId::new(name, 1 << 18), &exec, |b, &exec| {
            b.iter(|| fisher_monte_carlo_with(&cfg, black_box(1 << 18), 1, exec).unwrap())
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let cfg = config();
    let mut group = c.benchmark_group("sample_statistics");
    for (name, exec) in policies() {
        group.bench_with_input(BenchmarkId::new(name, 1 << 18), &exec, |b, &exec| {
            b.iter(|| sample_statistics_with(&cfg, black_box(1 << 18), 2, exec).unwrap())
        });
    }
    group.finish();
}

fn cramer_rao(c: &mut Criterion) {
    let cfg = config();
    let mut group = c.benchmark_group("crb_experiment");
    group.sample_size(10);
    for (name, exec) in policies() {
        group.bench_with_input(BenchmarkId::new(name, "1e4x100"), &exec, |b, &exec| {
            b.iter(|| crb_experiment_with(&cfg, black_box(10_000), 100, 3, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo_fisher, sampling, cramer_rao);
criterion_main!(benches);
