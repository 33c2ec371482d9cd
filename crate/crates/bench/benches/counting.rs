use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fqgraph::count::{complement_quadratic_in_last, count_projective_complement};
use fqgraph::poly::graph_poly::quartic_f;
use fqgraph::reduction::count_multilinear;
use fqgraph::Multigraph;
use fqgraph_bench::{field, psi_system};

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumeration");
    for (name, g, q) in [
        ("K4", Multigraph::complete(4), 7),
        ("W4", Multigraph::wheel(4), 5),
        ("W5", Multigraph::wheel(5), 3),
    ] {
        let system = psi_system(&g);
        let f = field(q);
        group.bench_with_input(BenchmarkId::new(name, q), &system, |b, s| {
            b.iter(|| count_projective_complement(black_box(s), &f).unwrap())
        });
    }
    group.finish();
}

fn multilinear(c: &mut Criterion) {
    let mut group = c.benchmark_group("multilinear");
    for (name, g) in [("K4", Multigraph::complete(4)), ("W4", Multigraph::wheel(4))] {
        let system = psi_system(&g);
        let f = field(101);
        group.bench_with_input(BenchmarkId::new(name, 101), &system, |b, s| {
            b.iter(|| count_multilinear(black_box(s), &f).unwrap())
        });
    }
    group.finish();
}

fn quartic(c: &mut Criterion) {
    let f = quartic_f();
    let mut group = c.benchmark_group("quartic_fibration");
    for p in [101u64, 499] {
        group.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| {
            b.iter(|| complement_quadratic_in_last(black_box(&f), p).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, multilinear, quartic);
criterion_main!(benches);
