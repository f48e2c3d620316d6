use cluster_atlas::atlas::{enumerate, EnumerationLimits};
use cluster_atlas::rank2::enumerate_chain;
use cluster_atlas::seed::Seed;
use cluster_atlas_bench::{dense_pair, matrix};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn bench_matrix_mutation(c: &mut Criterion) {
    let b = matrix("e6");
    c.bench_function("matrix_mutation_e6", |bench| {
        bench.iter(|| black_box(&b).mutate(2))
    });
}

fn bench_seed_mutation(c: &mut Criterion) {
    let seed = Seed::initial(&matrix("d4"))
        .mutate(2)
        .and_then(|s| s.mutate(0))
        .and_then(|s| s.mutate(3))
        .expect("mutations divide");
    c.bench_function("seed_mutation_d4_depth3", |bench| {
        bench.iter(|| black_box(&seed).mutate(1).expect("exchange divides"))
    });
}

fn bench_enumeration(c: &mut Criterion) {
    let limits = EnumerationLimits::default();
    for name in ["a3", "d4"] {
        let b = matrix(name);
        c.bench_function(&format!("enumerate_{name}"), |bench| {
            bench.iter(|| enumerate(black_box(&b), &limits).expect("enumerates"))
        });
    }
    let e6 = matrix("e6");
    c.bench_function("enumerate_e6", |bench| {
        bench.iter(|| enumerate(black_box(&e6), &limits).expect("enumerates"))
    });
}

fn bench_dense_arithmetic(c: &mut Criterion) {
    let (a, b) = dense_pair();
    let product = a.mul(&b);
    c.bench_function("mul_dense_rank2", |bench| {
        bench.iter(|| black_box(&a).mul(black_box(&b)))
    });
    c.bench_function("div_exact_dense_rank2", |bench| {
        bench.iter(|| black_box(&product).div_exact(black_box(&b)).expect("divides"))
    });
}

fn bench_rank2_chain(c: &mut Criterion) {
    c.bench_function("rank2_chain_r2_depth8", |bench| {
        bench.iter(|| enumerate_chain(2, 8).expect("chain enumerates"))
    });
}

criterion_group! {
    name = engine;
    config = Criterion::default().sample_size(10);
    targets = bench_matrix_mutation,
              bench_seed_mutation,
              bench_enumeration,
              bench_dense_arithmetic,
              bench_rank2_chain
}
criterion_main!(engine);
