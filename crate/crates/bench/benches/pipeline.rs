use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use spineccg_core::build::{build_ccg, normalize};
use spineccg_core::ccg::enumerate_derivations;
use spineccg_core::fixtures;
use spineccg_core::pipeline::check_equivalence;
use spineccg_core::pushdown::mpda_for_next;
use spineccg_core::spine::enumerate_trees;

fn stages(c: &mut Criterion) {
    let g = fixtures::ex41();
    let n = normalize(&g).unwrap();
    c.bench_function("mpda_for_next/ex41", |b| {
        b.iter(|| mpda_for_next(black_box(&n)).unwrap())
    });
    c.bench_function("build_ccg/ex41", |b| {
        b.iter(|| build_ccg(black_box(&g)).unwrap())
    });
}

fn enumeration(c: &mut Criterion) {
    let g = fixtures::ex41();
    let built = build_ccg(&g).unwrap();
    let mut group = c.benchmark_group("enumerate");
    for bound in [5, 7, 9] {
        group.bench_with_input(BenchmarkId::new("trees", bound), &bound, |b, &k| {
            b.iter(|| enumerate_trees(&g, k))
        });
        group.bench_with_input(BenchmarkId::new("derivations", bound), &bound, |b, &k| {
            b.iter(|| enumerate_derivations(&built.ccg, k))
        });
    }
    group.finish();
}

fn equivalence(c: &mut Criterion) {
    let g = fixtures::ex41();
    let mut group = c.benchmark_group("check_equivalence");
    group.sample_size(20);
    for bound in [7, 9] {
        group.bench_with_input(BenchmarkId::from_parameter(bound), &bound, |b, &k| {
            b.iter(|| check_equivalence(&g, k).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, stages, enumeration, equivalence);
criterion_main!(benches);
