use std::hint::black_box;

use bivar_core::{parse, DerivativeField, MixedOrder, Program};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const SOURCE: &str = "exp(t+s)*sin(t*s) + t^3*cos(2*s) - ln(1 + t^2*s^2)";

fn parsing(c: &mut Criterion) {
    c.bench_function("parse", |b| b.iter(|| parse(black_box(SOURCE)).unwrap()));
}

fn differentiation(c: &mut Criterion) {
    let mut group = c.benchmark_group("mixed_partial");
    for n in [1u32, 2, 3] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| {
                let field = DerivativeField::parse(SOURCE).unwrap();
                field.partial(MixedOrder::diagonal(black_box(n)).unwrap())
            })
        });
    }
    group.finish();
}

fn evaluation(c: &mut Criterion) {
    let expr = parse(SOURCE).unwrap();
    let program = Program::compile(&expr);
    let mut group = c.benchmark_group("eval");
    group.bench_function("tree", |b| {
        b.iter(|| expr.eval(black_box(0.3), black_box(0.7)).unwrap())
    });
    group.bench_function("program", |b| {
        b.iter(|| program.eval(black_box(0.3), black_box(0.7)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, parsing, differentiation, evaluation);
criterion_main!(benches);
