use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use convexlab::convex::{hull_iterate, HullOptions};
use convexlab::exceptional::{random_jet_survey, scan_directions};
use convexlab::exec;
use convexlab::manifold::{catalog_metric, CatalogParams};
use convexlab::Tolerances;

fn modes() -> [(&'static str, bool); 2] {
    [("sequential", true), ("parallel", false)]
}

fn direction_scan(c: &mut Criterion) {
    let tol = Tolerances::default();
    let metric = catalog_metric("perturbed", &CatalogParams { seed: 3, ..CatalogParams::dim(3) }).unwrap();
    let mut group = c.benchmark_group("direction-scan");
    group.sample_size(10);
    for (name, sequential) in modes() {
        group.bench_function(BenchmarkId::new(name, 162), |b| {
            exec::set_sequential(sequential);
            b.iter(|| scan_directions(&metric, &[0.1, 0.0, -0.1], 4, 162, &tol).unwrap())
        });
    }
    group.finish();
    exec::set_sequential(false);
}

fn jet_survey(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("jet-survey");
    group.sample_size(10);
    for (name, sequential) in modes() {
        group.bench_function(BenchmarkId::new(name, "m3-k4-x8"), |b| {
            exec::set_sequential(sequential);
            b.iter(|| random_jet_survey(3, 4, 8, 1, 42, &tol).unwrap())
        });
    }
    group.finish();
    exec::set_sequential(false);
}

fn hull(c: &mut Criterion) {
    let sphere = Arc::new(catalog_metric("round-sphere", &CatalogParams::dim(2)).unwrap());
    let tri = vec![vec![-0.1, -0.05], vec![0.1, -0.075], vec![0.0, 0.1]];
    let opts = HullOptions { h: 0.03, density: 400, seed: 1 };
    let mut group = c.benchmark_group("hull-iterate");
    group.sample_size(10);
    for (name, sequential) in modes() {
        group.bench_function(BenchmarkId::new(name, "triangle"), |b| {
            exec::set_sequential(sequential);
            b.iter(|| hull_iterate(&sphere, &tri, 2, &opts).unwrap())
        });
    }
    group.finish();
    exec::set_sequential(false);
}

criterion_group!(benches, direction_scan, jet_survey, hull);
criterion_main!(benches);
