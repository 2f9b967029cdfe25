//! Sequential against parallel execution of the lattice kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use okounkov::catalog;
use okounkov::lattice::{count_with, enumerate_with};
use okounkov::par::Exec;
use okounkov::rational::rat;

fn modes() -> Vec<(&'static str, Exec)> {
    let mut v = vec![("sequential", Exec::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Exec::Parallel));
    v
}

fn bench_count(c: &mut Criterion) {
    let bodies = okounkov::estimates::sample_polytopes(3, 1, 4).unwrap();
    let mut group = c.benchmark_group("count_3d");
    for (name, exec) in modes() {
        for k in [20u64, 60] {
            group.bench_with_input(BenchmarkId::new(name, k), &k, |b, &k| {
                b.iter(|| bodies.iter().map(|p| count_with(p, k, exec).unwrap()).sum::<u64>())
            });
        }
    }
    group.finish();
}

fn bench_enumerate(c: &mut Criterion) {
    let p2 = catalog::anticanonical_p2();
    let mut group = c.benchmark_group("enumerate_p2");
    for (name, exec) in modes() {
        group.bench_function(name, |b| b.iter(|| enumerate_with(&p2, 40, exec).unwrap().len()));
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let square = catalog::unit_square();
    let nu = rat(1, 10);
    let bodies = okounkov::estimates::sample_sub_bodies(&square, 0, 40, &nu).unwrap();
    let range = okounkov::estimates::KRange::new(1, 20).unwrap();
    let mut group = c.benchmark_group("ehrhart_sweep");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| okounkov::estimates::verify_uniform_ehrhart(&square, &bodies, &nu, range, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_count, bench_enumerate, bench_sweep);
criterion_main!(benches);
