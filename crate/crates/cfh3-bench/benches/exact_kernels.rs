//! Microbenchmarks of the exact-arithmetic primitives: group law,
//! intersection kernel, and the Monte Carlo sampling loop.

use cfh3_bench::{element_pair, pair_window, sheared_pair};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

use cfh3::mc::mc_box_pair_volume;

fn group_law(c: &mut Criterion) {
    let (g, h) = element_pair();
    c.bench_function("group_mul", |b| b.iter(|| black_box(&g).mul(black_box(&h))));
    c.bench_function("group_inv", |b| b.iter(|| black_box(&g).inv()));
    c.bench_function("group_commutator", |b| {
        b.iter(|| cfh3::GroupElement::commutator(black_box(&g), black_box(&h)))
    });
}

fn intersection_kernel(c: &mut Criterion) {
    let (a, bx) = sheared_pair();
    c.bench_function("kernel_sheared_pair", |b| {
        b.iter(|| black_box(&a).intersect_volume(black_box(&bx)))
    });
    let (g, _) = element_pair();
    let translated = bx.left_translate(&g);
    c.bench_function("kernel_translated_pair", |b| {
        b.iter(|| black_box(&a).intersect_volume(black_box(&translated)))
    });
}

fn mc_sampling(c: &mut Criterion) {
    let (a, bx) = sheared_pair();
    let window = pair_window();
    let mut group = c.benchmark_group("mc");
    group.sample_size(20);
    group.bench_function("pair_volume_100k_samples", |b| {
        b.iter(|| mc_box_pair_volume(black_box(&a), black_box(&bx), &window, 100_000, 5, 1))
    });
    group.finish();
}

criterion_group!(benches, group_law, intersection_kernel, mc_sampling);
criterion_main!(benches);
