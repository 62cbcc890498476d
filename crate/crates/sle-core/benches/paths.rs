//! Path-level parallel map against the sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sle_core::loewner::AngleConfig;
use sle_core::par::Exec;
use sle_core::verify::{check_slice_martingale, check_spiral_martingale, McConfig};
use std::f64::consts::PI;

fn config(exec: Exec) -> McConfig {
    let mut cfg = McConfig::new(256, 1e-3, 7);
    cfg.exec = exec;
    cfg
}

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("paths");
    group.sample_size(10);
    let pair = AngleConfig::new(vec![0.0, PI]).unwrap();
    for (name, exec) in [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)] {
        let cfg = config(exec);
        group.bench_with_input(BenchmarkId::new("spiral_martingale", name), &cfg, |b, cfg| {
            b.iter(|| check_spiral_martingale(2.0, 1.0, 0.0, 1.0, cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("slice_martingale", name), &cfg, |b, cfg| {
            b.iter(|| check_slice_martingale(3.0, 0.0, &pair, 0.5, cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
