use algent::basis::SymBasis;
use algent::entropy::entropy_pure;
use algent::pyramid::build_pyramid;
use algent_bench::spread_state;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn bench_pyramid_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("pyramid_build");
    for n in [10u32, 20, 40] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let basis = SymBasis::new(n);
            b.iter(|| black_box(build_pyramid(&basis).unwrap()));
        });
    }
    group.finish();
}

fn bench_pure_entropy(c: &mut Criterion) {
    let mut group = c.benchmark_group("pure_entropy");
    for n in [10u32, 20, 40] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let basis = SymBasis::new(n);
            let pyr = build_pyramid(&basis).unwrap();
            let psi = spread_state(&basis);
            b.iter(|| black_box(entropy_pure(&psi, &pyr).unwrap()));
        });
    }
    group.finish();
}

criterion_group!(benches, bench_pyramid_build, bench_pure_entropy);
criterion_main!(benches);
