use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qnu_bench::{chain, model};
use qnu_core::{
    assemble, build_tasks, compute_utility, enumerate_coalitions, EnumerationConfig,
};
use std::hint::black_box;

fn bench_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_coalitions");
    for &m in &[8usize, 12, 16] {
        let net = chain(m, 0.01);
        group.bench_with_input(BenchmarkId::from_parameter(m), &net, |b, net| {
            b.iter(|| enumerate_coalitions(black_box(net), &EnumerationConfig::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_assemble(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    let model = model();
    for &m in &[8usize, 12, 16] {
        let net = chain(m, 0.01);
        let coalitions = enumerate_coalitions(&net, &EnumerationConfig::default()).unwrap();
        let tasks = build_tasks(&net, &coalitions, &model);
        group.bench_with_input(BenchmarkId::from_parameter(m), &(), |b, _| {
            b.iter(|| assemble(black_box(&net), black_box(&tasks)))
        });
    }
    group.finish();
}

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("compute_utility");
    group.sample_size(20);
    let model = model();
    let cfg = EnumerationConfig::default();
    for &m in &[6usize, 10, 14] {
        let net = chain(m, 0.01);
        group.bench_with_input(BenchmarkId::from_parameter(m), &net, |b, net| {
            b.iter(|| compute_utility(black_box(net), &model, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_enumeration, bench_assemble, bench_solve);
criterion_main!(benches);
