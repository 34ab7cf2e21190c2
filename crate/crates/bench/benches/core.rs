use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rosen_bench::{context, sample_coeffs, vertex};
use rosen_core::cf::{
    enumerate_geodesic_expansions, is_geodesic, nearest_integer_expansion, reduce_to_geodesic,
};
use rosen_core::{oracle, FieldElement, RosenCF};

fn field(c: &mut Criterion) {
    let ctx = context(7);
    let a = FieldElement::parse(&ctx, "3/4 + 2*l - 5/3*l^2").unwrap();
    let b = FieldElement::parse(&ctx, "-1 + l^2 + 7*l^3").unwrap();
    c.bench_function("field/mul q=7", |bn| {
        bn.iter(|| black_box(&a) * black_box(&b))
    });
    c.bench_function("field/div q=7", |bn| {
        bn.iter(|| black_box(&a).checked_div(black_box(&b)).unwrap())
    });
    c.bench_function("field/signum q=7", |bn| {
        bn.iter(|| (black_box(&a) - black_box(&b)).signum())
    });
}

fn expansions(c: &mut Criterion) {
    let mut g = c.benchmark_group("expand");
    for q in [3u32, 5, 8] {
        let ctx = context(q);
        let y = RosenCF::new(&ctx, sample_coeffs(12)).unwrap().evaluate();
        g.bench_with_input(BenchmarkId::new("nearest", q), &y, |bn, y| {
            bn.iter(|| nearest_integer_expansion(&ctx, y).unwrap())
        });
    }
    g.finish();
}

fn geodesics(c: &mut Criterion) {
    let mut g = c.benchmark_group("geodesic");
    for n in [8usize, 32, 128] {
        let ctx = context(5);
        let cf = RosenCF::new(&ctx, sample_coeffs(n)).unwrap();
        g.bench_with_input(BenchmarkId::new("check q=5", n), &cf, |bn, cf| {
            bn.iter(|| is_geodesic(cf).unwrap())
        });
    }
    let ctx = context(4);
    let cf = RosenCF::new(&ctx, vec![3, 1, 2, 1, 1, 2, 1, -1, -2, -1, 4]).unwrap();
    g.bench_function("reduce q=4", |bn| {
        bn.iter(|| reduce_to_geodesic(&cf).unwrap())
    });
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let ctx = context(6);
    let y = vertex(&ctx, &[1, 1, 1, 2, 1, 1, 1]);
    c.bench_function("enumerate q=6", |bn| {
        bn.iter(|| enumerate_geodesic_expansions(&y).unwrap())
    });
    let ctx = context(5);
    let inf = rosen_core::Vertex::infinity(&ctx);
    let y = vertex(&ctx, &sample_coeffs(6));
    c.bench_function("oracle distance q=5", |bn| {
        bn.iter(|| oracle::distance(&inf, &y).unwrap())
    });
}

criterion_group!(benches, field, expansions, geodesics, enumeration);
criterion_main!(benches);
