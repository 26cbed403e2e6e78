use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qrr_core::catalog::{Catalog, Side};
use qrr_core::dsl::Specialization;
use qrr_core::prodsearch::prodmake;
use qrr_core::qspecial::TTable;
use qrr_core::QSeries;

fn series_mul_invert(c: &mut Criterion) {
    let mut group = c.benchmark_group("series");
    for n in [100i64, 200, 400] {
        let coeffs: Vec<i64> = (0..=n).map(|k| (k * 7 + 3) % 11 - 5).collect();
        let mut a = QSeries::from_i64s(0, &coeffs, n);
        a = a.add(&QSeries::one(n)).unwrap();
        let b = a.shift(1).add(&QSeries::one(n + 1)).unwrap().truncate(n).unwrap();
        group.bench_with_input(BenchmarkId::new("mul", n), &n, |bch, _| {
            bch.iter(|| black_box(&a).mul(black_box(&b)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("invert", n), &n, |bch, _| {
            bch.iter(|| black_box(&b).invert().unwrap())
        });
    }
    group.finish();
}

fn catalog_sides(c: &mut Criterion) {
    let cat = Catalog::builtin();
    let spec = Specialization::default();
    let mut group = c.benchmark_group("evaluate");
    for id in ["rr1-a", "GG1", "qdeq", "c15eq"] {
        group.bench_function(BenchmarkId::new("lhs_N200", id), |b| {
            b.iter(|| cat.evaluate_side(id, Side::Lhs, &spec, 200).unwrap().unwrap())
        });
    }
    group.finish();
}

fn products(c: &mut Criterion) {
    let cat = Catalog::builtin();
    let f = cat
        .evaluate_side("c15eq", Side::Lhs, &Specialization::default(), 200)
        .unwrap()
        .unwrap();
    c.bench_function("prodmake_c15eq_N200", |b| {
        b.iter(|| prodmake(black_box(&f), 200).unwrap())
    });
    c.bench_function("ttable_L41", |b| b.iter(|| TTable::new(black_box(41))));
}

criterion_group!(benches, series_mul_invert, catalog_sides, products);
criterion_main!(benches);
