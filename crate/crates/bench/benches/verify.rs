use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qrr_core::catalog::Catalog;
use qrr_core::partitions::{verify_partition_theorem, Theorem};
use qrr_core::qdifference::{p_n_bivariate, p_n_recurrence, q_n_bosonic};
use qrr_core::verify::{verify_identity, verify_transformation, SpecGrid};

fn verify(c: &mut Criterion) {
    let cat = Catalog::builtin();
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    group.bench_function("identity_GG1_N200", |b| {
        b.iter(|| verify_identity(cat, "GG1", 200).unwrap())
    });
    group.bench_function("transformation_eq1_N60", |b| {
        b.iter(|| verify_transformation(cat, "eq1", &SpecGrid::default(), 60).unwrap())
    });
    group.bench_function("partitions_tGGn_200", |b| {
        b.iter(|| verify_partition_theorem(cat, Theorem::Ggn, 200).unwrap())
    });
    group.finish();
}

fn qdifference(c: &mut Criterion) {
    let mut group = c.benchmark_group("qdifference");
    group.sample_size(10);
    group.bench_function("p_n_recurrence_40", |b| b.iter(|| p_n_recurrence(black_box(40))));
    group.bench_function("q_n_bosonic_40", |b| b.iter(|| q_n_bosonic(black_box(40))));
    group.bench_function("p_n_bivariate_25", |b| b.iter(|| p_n_bivariate(25, 675).unwrap()));
    group.finish();
}

criterion_group!(benches, verify, qdifference);
criterion_main!(benches);
