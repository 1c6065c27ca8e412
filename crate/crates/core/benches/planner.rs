//! Planner throughput on the default rayon pool against a one-thread pool.
//! Build with `--no-default-features` to time the sequential code path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;

use swarmplan::colored::{plan_colored, Image};
use swarmplan::continuous::{plan_dense, validate_trajectories};
use swarmplan::generate::{gen_continuous, gen_random};
use swarmplan::scheduler::{plan_auto, plan_full};
use swarmplan::GridDims;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("one_thread", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("rayon", ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn full_grids(c: &mut Criterion) {
    let mut g = c.benchmark_group("plan_full");
    g.sample_size(10);
    for n in [48u32, 96] {
        let inst = gen_random(GridDims::new(n, n), (n * n) as usize, 1, 7).unwrap();
        for (name, pool) in pools() {
            g.bench_with_input(BenchmarkId::new(name, n), &inst, |b, inst| b.iter(|| pool.install(|| plan_full(inst).unwrap())));
        }
    }
    g.finish();
}

fn clusters(c: &mut Criterion) {
    let mut g = c.benchmark_group("plan_auto_clusters");
    g.sample_size(10);
    let inst = gen_random(GridDims::new(120, 120), 2000, 3, 11).unwrap();
    for (name, pool) in pools() {
        g.bench_function(name, |b| b.iter(|| pool.install(|| plan_auto(&inst).unwrap())));
    }
    g.finish();
}

fn colored(c: &mut Criterion) {
    let mut g = c.benchmark_group("plan_colored");
    g.sample_size(10);
    let dims = GridDims::new(40, 40);
    let inst = gen_random(dims, 1600, 3, 5).unwrap();
    let (mut a, mut t) = (Image::empty(dims), Image::empty(dims));
    for r in 0..inst.robots() {
        let col = r as u32 % 6;
        a.set(inst.start.positions[r], col);
        t.set(inst.target.positions[r], col);
    }
    for (name, pool) in pools() {
        g.bench_function(name, |b| b.iter(|| pool.install(|| plan_colored(&a, &t).unwrap())));
    }
    g.finish();
}

fn continuous(c: &mut Criterion) {
    let mut g = c.benchmark_group("continuous_dense_100");
    g.sample_size(10);
    let inst = gen_continuous(100, 2.0, 40.0, 3).unwrap();
    let ts = plan_dense(&inst).unwrap();
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new("plan", name), |b| b.iter(|| pool.install(|| plan_dense(&inst).unwrap())));
        g.bench_function(BenchmarkId::new("validate", name), |b| b.iter(|| pool.install(|| validate_trajectories(&ts, &inst))));
    }
    g.finish();
}

criterion_group!(benches, full_grids, clusters, colored, continuous);
criterion_main!(benches);
