use std::hint::black_box;

use bsize_core::{fixed_subsets, partitions_of, scan, weight_table_with, PassOptions};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn pass(c: &mut Criterion) {
    let mut group = c.benchmark_group("weight_table");
    group.sample_size(10);
    for (n, k) in [(30, 6), (40, 8), (45, 9)] {
        let partitions = partitions_of(n).unwrap().count() as u64;
        group.throughput(Throughput::Elements(partitions));
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{n}/{k}")),
            &(n, k),
            |b, &(n, k)| b.iter(|| weight_table_with(n, k, &PassOptions::with_threads(1)).unwrap()),
        );
    }
    group.finish();
}

fn fix_counts(c: &mut Criterion) {
    let types: Vec<_> = partitions_of(24).unwrap().collect();
    let mut group = c.benchmark_group("fixed_subsets");
    group.throughput(Throughput::Elements(types.len() as u64));
    group.bench_function("n24_k8", |b| {
        b.iter(|| {
            for ct in &types {
                black_box(fixed_subsets(ct, 8).unwrap());
            }
        })
    });
    group.finish();
}

fn scanning(c: &mut Criterion) {
    let table = weight_table_with(45, 9, &PassOptions::default()).unwrap().0;
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    group.throughput(Throughput::Elements(table.distinct_counts() as u64));
    group.bench_function("n45_k9", |b| b.iter(|| scan(black_box(&table)).unwrap()));
    group.bench_function("n45_k9_h_batch", |b| b.iter(|| table.h_batch(5, 4)));
    group.finish();
}

criterion_group!(benches, pass, fix_counts, scanning);
criterion_main!(benches);
