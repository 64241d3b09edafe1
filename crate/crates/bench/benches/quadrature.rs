use std::hint::black_box;

use bivar_core::approx::{remainder_b, RemainderMode};
use bivar_core::bivariation::{partition_sum, total_bivariation, VariationMethod};
use bivar_core::rs_quad::{lebesgue_double_integral, rs_double_integral, QuadOptions, RsOptions};
use bivar_core::{uniform_partition, DerivativeField, EvalPoint, MixedOrder, Rectangle, SignVariant};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn stieltjes(c: &mut Criterion) {
    let unit = Rectangle::unit();
    let f = DerivativeField::parse("exp(t+s)*sin(t*s)").unwrap();
    let g = DerivativeField::parse("t^2*s").unwrap();
    let mut group = c.benchmark_group("rs_double_integral");
    for tol in [1e-4, 1e-6, 1e-8] {
        group.bench_with_input(BenchmarkId::from_parameter(tol), &tol, |b, &tol| {
            b.iter(|| rs_double_integral(&g, &f, &unit, &RsOptions::new(black_box(tol))).unwrap())
        });
    }
    group.finish();
}

fn gauss(c: &mut Criterion) {
    let unit = Rectangle::unit();
    let f = DerivativeField::parse("exp(t+s)*sin(t*s)").unwrap();
    c.bench_function("lebesgue_double_integral/1e-10", |b| {
        b.iter(|| lebesgue_double_integral(&f, &unit, &QuadOptions::new(black_box(1e-10))).unwrap())
    });
}

fn variation(c: &mut Criterion) {
    let unit = Rectangle::unit();
    let f = DerivativeField::parse("t*(1-t)*s*(1-s)").unwrap();
    let mut group = c.benchmark_group("partition_sum");
    for m in [64, 256, 1024] {
        let grid = uniform_partition(&unit, m, m).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &grid, |b, grid| {
            b.iter(|| partition_sum(&f, black_box(grid)).unwrap())
        });
    }
    group.finish();
    c.bench_function("total_bivariation/smooth", |b| {
        b.iter(|| {
            total_bivariation(
                &f,
                MixedOrder::ZERO,
                &unit,
                VariationMethod::SmoothQuadrature,
                black_box(1e-8),
            )
            .unwrap()
        })
    });
}

fn remainder(c: &mut Criterion) {
    let unit = Rectangle::unit();
    let f = DerivativeField::parse("sin(t)*exp(s)").unwrap();
    let point = EvalPoint::new(0.3, 0.6);
    let mut group = c.benchmark_group("remainder_b");
    for n in 0..=2u32 {
        for mode in [RemainderMode::Rs, RemainderMode::Lebesgue] {
            let id = BenchmarkId::new(format!("{mode:?}"), n);
            group.bench_with_input(id, &n, |b, &n| {
                b.iter(|| remainder_b(&f, n, black_box(point), &unit, 1e-8, mode, SignVariant::default()).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, stieltjes, gauss, variation, remainder);
criterion_main!(benches);
