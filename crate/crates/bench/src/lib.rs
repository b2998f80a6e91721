//! Criterion benchmarks for the hot paths of `logistic-core`.

use criterion::{black_box, BenchmarkId, Criterion};
use logistic_core::cycles::superstable_ladder;
use logistic_core::ergodic::{bifurcation_scan_with_workers, lyapunov, ScanSettings};
use logistic_core::map::orbit;
use logistic_core::picard::{breakdown_scan_with, picard_iterate, BridgeSettings};
use logistic_core::{MapParams, OdeParams};

pub fn benchmarks(c: &mut Criterion) {
    map(c);
    ladder(c);
    scan(c);
    picard(c);
}

fn map(c: &mut Criterion) {
    let params = MapParams::new(3.9).unwrap();
    c.bench_function("orbit/10k+1k", |b| {
        b.iter(|| orbit(params, black_box(0.3), 1_000, 10_000).unwrap())
    });
    c.bench_function("lyapunov/1e5", |b| {
        b.iter(|| lyapunov(params, black_box(0.3), 100_000, 10_000).unwrap())
    });
}

fn ladder(c: &mut Criterion) {
    let mut group = c.benchmark_group("superstable_ladder");
    for max_period in [16, 128] {
        group.bench_with_input(
            BenchmarkId::from_parameter(max_period),
            &max_period,
            |b, &p| b.iter(|| superstable_ladder(p).unwrap()),
        );
    }
    group.finish();
}

fn scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("bifurcation_scan");
    group.sample_size(10);
    let settings = ScanSettings::new(2.8, 4.0, 200);
    for workers in [1, 4] {
        group.bench_with_input(BenchmarkId::new("workers", workers), &workers, |b, &w| {
            b.iter(|| bifurcation_scan_with_workers(&settings, w).unwrap())
        });
    }
    group.finish();

    c.bench_function("breakdown_scan/100", |b| {
        b.iter(|| breakdown_scan_with(2.5, 4.0, 100, BridgeSettings::default(), Some(1)).unwrap())
    });
}

fn picard(c: &mut Criterion) {
    let params = OdeParams::new(1.0, 1.0, 0.5).unwrap();
    c.bench_function("picard/dt=1/512", |b| {
        b.iter(|| picard_iterate(params, 0.5, 0.25, 1.0 / 512.0, 1e-10, 50).unwrap())
    });
}
