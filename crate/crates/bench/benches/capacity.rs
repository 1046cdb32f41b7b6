use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use qcap_core::capacity::{integrate_capacity, Bound, Protocol, QuadratureConfig};
use qcap_core::chain::{chain_determinant, ResponseEvaluator};
use qcap_core::designs::{flatness_order, maximally_flat_params};
use qcap_core::optimize::{grid_search_0stage, Axis, Objective, SearchSpace};
use qcap_core::special::hyp2f1_special;

fn determinant(c: &mut Criterion) {
    let mut group = c.benchmark_group("determinant");
    for n in [0usize, 10, 100] {
        let p = maximally_flat_params(n, 1.0, 0.0).unwrap().params;
        group.bench_with_input(BenchmarkId::new("continuant", n), &p, |b, p| {
            b.iter(|| chain_determinant(p, black_box(0.37)).unwrap())
        });
        let eval = ResponseEvaluator::new(&p).unwrap();
        group.bench_with_input(BenchmarkId::new("evaluator", n), &eval, |b, e| {
            b.iter(|| e.efficiency_and_loss(black_box(0.37)).unwrap())
        });
    }
    group.finish();
}

fn capacity(c: &mut Criterion) {
    let mut group = c.benchmark_group("capacity");
    let cfg = QuadratureConfig::default();
    for n in [0usize, 4, 8] {
        let p = maximally_flat_params(n, 1.0, 0.0).unwrap().params;
        for (label, protocol, bound, nbar) in [
            ("q1", Protocol::OneWay, Bound::Pure, 0.0),
            ("q2", Protocol::TwoWay, Bound::Pure, 0.0),
            ("q2-thermal-lower", Protocol::TwoWay, Bound::ThermalLower, 10.0),
        ] {
            group.bench_with_input(BenchmarkId::new(label, n), &p, |b, p| {
                b.iter(|| integrate_capacity(p, protocol, bound, nbar, &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn special(c: &mut Criterion) {
    let mut group = c.benchmark_group("hyp2f1");
    for z in [0.5, 10.0, 1e3] {
        group.bench_with_input(BenchmarkId::from_parameter(z), &z, |b, &z| {
            b.iter(|| hyp2f1_special(black_box(0.25), z).unwrap())
        });
    }
    group.finish();
}

fn designs(c: &mut Criterion) {
    let p = maximally_flat_params(4, 1.0, 0.0).unwrap().params;
    c.bench_function("flatness_order/N=4", |b| b.iter(|| flatness_order(&p, 0.0, 11).unwrap()));
}

fn search(c: &mut Criterion) {
    let space = SearchSpace::new(vec![
        Axis::new("kappa_a", 0.5, 4.0, 7),
        Axis::new("kappa_b", 0.5, 4.0, 7),
        Axis::new("delta", -2.0, 2.0, 7),
    ]);
    let cfg = QuadratureConfig::sweep();
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    group.bench_function("0stage-7^3", |b| b.iter(|| grid_search_0stage(Objective::Q2, &space, 0, &cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, determinant, capacity, special, designs, search);
criterion_main!(benches);
