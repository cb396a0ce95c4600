use criterion::{black_box, criterion_group, criterion_main, Criterion};
use morrey_lab::kernel::KernelSpec;
use morrey_lab::{GrowthFunction, LebesgueExponent, MorreyScale};
use morrey_lab_bench::*;

fn kernel_norms(c: &mut Criterion) {
    let k1 = KernelSpec::new(kernel_1d());
    let k2 = KernelSpec::new(kernel_2d());
    let t = LebesgueExponent::new(1.2).unwrap();
    c.bench_function("lebesgue_1d", |b| b.iter(|| k1.lebesgue_norm(black_box(t))));
    let t2 = LebesgueExponent::new(1.5).unwrap();
    c.bench_function("lebesgue_2d", |b| b.iter(|| k2.lebesgue_norm(black_box(t2))));
    c.bench_function("dyadic_1d", |b| b.iter(|| k1.dyadic_sum_estimate(black_box(1.2), 1.0, None).unwrap()));
    let classical = MorreyScale::Classical { q: 1.2 };
    c.bench_function("morrey_1d", |b| b.iter(|| k1.morrey_norm(black_box(1.0), &classical).unwrap()));
    let sigma = MorreyScale::Generalized { phi: GrowthFunction::composite(1, 1.2, 2.4).unwrap() };
    c.bench_function("gen_morrey_1d", |b| b.iter(|| k1.morrey_norm(black_box(1.0), &sigma).unwrap()));
}

criterion_group!(benches, kernel_norms);
criterion_main!(benches);
