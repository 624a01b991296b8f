use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use divres::batch::scan_sequential;
use divres::divisor::tau_with;
use divres::{EvalOptions, Natural};

fn scans(c: &mut Criterion) {
    let opts = EvalOptions::default();
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    for end in [50u64, 150] {
        group.bench_with_input(BenchmarkId::new("sequential", end), &end, |b, &end| {
            b.iter(|| scan_sequential(1, black_box(end), &opts).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", end), &end, |b, &end| {
            b.iter(|| divres::batch::scan_parallel(1, black_box(end), &opts).unwrap())
        });
    }
    group.finish();
}

fn single_tau(c: &mut Criterion) {
    let opts = EvalOptions::default();
    let mut group = c.benchmark_group("tau");
    group.sample_size(10);
    for s in [10u64, 100, 1000] {
        let n = Natural::new(s).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(s), &n, |b, &n| {
            b.iter(|| tau_with(black_box(n), &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, scans, single_tau);
criterion_main!(benches);
