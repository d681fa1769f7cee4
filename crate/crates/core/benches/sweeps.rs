use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qgsmooth::corpus::verify_all;
use qgsmooth::exec::Exec;
use qgsmooth::wahl::sweep::sweep;

fn strategies() -> Vec<(&'static str, Exec)> {
    let mut out = vec![("sequential", Exec::Sequential)];
    if Exec::parallel_available() {
        out.push(("parallel", Exec::Parallel));
    }
    out
}

fn chain_sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("chain_sweep");
    g.sample_size(10);
    for (len, entry) in [(5usize, 9u64), (6, 10)] {
        for (name, exec) in strategies() {
            g.bench_with_input(
                BenchmarkId::new(name, format!("len{len}_max{entry}")),
                &(len, entry),
                |b, &(l, e)| b.iter(|| sweep(black_box(l), black_box(e), exec)),
            );
        }
    }
    g.finish();
}

fn corpus(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify_all");
    g.sample_size(20);
    for (name, exec) in strategies() {
        g.bench_function(name, |b| b.iter(|| verify_all(exec)));
    }
    g.finish();
}

criterion_group!(benches, chain_sweep, corpus);
criterion_main!(benches);
