use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qsinn::bruteforce::exhaustive_search;
use qsinn::harness::{run_sweep, SweepConfig};
use qsinn::nets::NetworkConfig;
use qsinn::quantum::instances::random_instance;
use qsinn::sim::{GateOp, QuantumState, StateVector};
use qsinn::Parallelism;

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("rayon", Parallelism::Auto)];

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let mut cfg = SweepConfig::sinnn(vec![(6, 2), (8, 3)], 4);
    cfg.epochs = 50;
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| run_sweep(&cfg, mode).unwrap()));
    }
    group.finish();
}

fn brute_force(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force");
    group.sample_size(10);
    let inst = random_instance(1, 4, 8).unwrap();
    let data = inst.dataset.classical_pairs();
    let cfg = NetworkConfig::dsinnn(&[3, 3, 2], 0.0);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exhaustive_search(&cfg, &data, mode).unwrap())
        });
    }
    group.finish();
}

fn dense_gates(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense_gates");
    group.sample_size(10);
    let n = 20;
    let layer: Vec<GateOp> = (0..n).map(GateOp::h).chain((0..n - 1).map(|q| GateOp::cx(q, q + 1).unwrap())).collect();
    for (name, mode) in MODES {
        let mut state = StateVector::new(n).unwrap().with_parallelism(mode);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                for g in &layer {
                    state.apply_gate(g).unwrap();
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, brute_force, dense_gates);
criterion_main!(benches);
