use std::hint::black_box;

use arfspin::enumeration::candidate_space;
use arfspin::{SpinModulus, TopologicalType};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn tally(c: &mut Criterion) {
    let mut group = c.benchmark_group("tally");
    group.sample_size(10);
    for (g, k, eps, m) in [(5, 2, 1, 4), (6, 7, 1, 6), (6, 3, 0, 6)] {
        let t = TopologicalType::new(g, k, eps).unwrap();
        let space = candidate_space(&t, SpinModulus::new(m).unwrap(), None).unwrap();
        let label = format!("g{g}k{k}e{eps}m{m}");
        group.bench_with_input(BenchmarkId::new("sequential", &label), &space, |b, s| {
            b.iter(|| black_box(s.tally_sequential()))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", &label), &space, |b, s| {
            b.iter(|| black_box(s.tally_parallel()))
        });
    }
    group.finish();
}

criterion_group!(benches, tally);
criterion_main!(benches);
