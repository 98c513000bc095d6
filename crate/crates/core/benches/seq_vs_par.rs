use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mmf_core::dataio::{random_gaussian, random_symmetric};
use mmf_core::{DirectMmf, Exec, Sparsifier, SparsifierKind, SymmetricMmf};

fn direct(c: &mut Criterion) {
    let mut group = c.benchmark_group("direct_factor");
    group.sample_size(10);
    for n in [128usize, 384] {
        let a = random_gaussian(n, 1);
        let d = n / 8;
        let sp = Sparsifier::default_for(SparsifierKind::GreedyTopN, n, d);
        for (label, exec) in [("seq", Exec::Sequential), ("par", Exec::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, n), &a, |b, a| {
                b.iter(|| black_box(DirectMmf::new(d).exec(exec).factor(a, sp).unwrap()))
            });
        }
    }
    group.finish();
}

fn symmetric(c: &mut Criterion) {
    let mut group = c.benchmark_group("symmetric_factor");
    group.sample_size(10);
    let n = 384;
    let a = random_symmetric(n, 2);
    for (label, exec) in [("seq", Exec::Sequential), ("par", Exec::Parallel)] {
        group.bench_function(label, |b| {
            b.iter(|| black_box(SymmetricMmf::new(n / 8).exec(exec).factor(&a).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, direct, symmetric);
criterion_main!(benches);
