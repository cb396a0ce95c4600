use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use morrey_lab::norms::{gen_morrey_norm, morrey_norm};
use morrey_lab::operators::{apply_bessel_riesz, maximal};
use morrey_lab::{GrowthFunction, MaximalConfig, ScanConfig};
use morrey_lab_bench::*;

fn apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply");
    group.sample_size(10);
    for h in [1.0 / 64.0, 1.0 / 256.0] {
        let f = unit_ball(1, h, 8.0);
        group.bench_with_input(BenchmarkId::new("1d", f.grid().len()), &f, |b, f| {
            b.iter(|| apply_bessel_riesz(&kernel_1d(), black_box(f)).unwrap())
        });
    }
    let f = unit_ball(2, 1.0 / 16.0, 2.0);
    group.bench_with_input(BenchmarkId::new("2d", f.grid().len()), &f, |b, f| {
        b.iter(|| apply_bessel_riesz(&kernel_2d(), black_box(f)).unwrap())
    });
    group.finish();
}

fn maximal_function(c: &mut Criterion) {
    let mut group = c.benchmark_group("maximal");
    group.sample_size(10);
    let f = gaussian(1, 1.0 / 256.0, 8.0);
    group.bench_function("1d", |b| b.iter(|| maximal(black_box(&f), &MaximalConfig::default()).unwrap()));
    let f = gaussian(2, 1.0 / 32.0, 2.0);
    group.bench_function("2d", |b| b.iter(|| maximal(black_box(&f), &MaximalConfig::default()).unwrap()));
    group.finish();
}

fn norms(c: &mut Criterion) {
    let mut group = c.benchmark_group("norms");
    let f = unit_ball(1, 1.0 / 256.0, 8.0);
    let scan = ScanConfig::default();
    group.bench_function("morrey_1d", |b| b.iter(|| morrey_norm(black_box(&f), 2.0, 4.0, &scan).unwrap()));
    let phi = GrowthFunction::composite(1, 1.2, 2.4).unwrap();
    group.bench_function("gen_morrey_1d", |b| b.iter(|| gen_morrey_norm(black_box(&f), 1.5, &phi, &scan).unwrap()));
    let f = unit_ball(2, 1.0 / 32.0, 2.0);
    group.bench_function("morrey_2d", |b| b.iter(|| morrey_norm(black_box(&f), 2.0, 4.0, &scan).unwrap()));
    group.finish();
}

criterion_group!(benches, apply, maximal_function, norms);
criterion_main!(benches);
