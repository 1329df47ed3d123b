//! Sequential vs rayon execution of the two data-parallel hot paths: trial
//! batches in a sweep cell and sparse vector-matrix products.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use contagion::graph::{generate_synthetic, SyntheticModel};
use contagion::harness::{run_sweep_with, ExperimentConfig, GraphSource};
use contagion::interventions::Strategy;
use contagion::metrics::TransitionMatrix;
use contagion::par::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Ambient)];

fn sweep(c: &mut Criterion) {
    let model = SyntheticModel::SmallWorld { n: 2000, k: 10, beta: 0.1 };
    let g = generate_synthetic(model, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let mut cfg = ExperimentConfig::new(GraphSource::Synthetic(model));
    cfg.trials = 64;
    cfg.visibility = vec![0.35];
    cfg.budget = vec![0.45];

    let mut group = c.benchmark_group("sweep_cell");
    group.sample_size(10);
    for strategy in [Strategy::Null, Strategy::ContactTracing, Strategy::SuperLink] {
        cfg.strategies = vec![strategy];
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, strategy.id()), &exec, |b, &exec| {
                b.iter(|| run_sweep_with(&g, &cfg, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn walk(c: &mut Criterion) {
    let mut group = c.benchmark_group("left_multiply");
    for n in [10_000, 100_000] {
        let model = SyntheticModel::PreferentialAttachment { n, m: 4 };
        let g = generate_synthetic(model, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let p = TransitionMatrix::standard(&g);
        let q = vec![1.0 / n as f64; n];
        let mut out = vec![0.0; n];
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &exec, |b, &exec| {
                b.iter(|| p.left_multiply(&q, &mut out, exec))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep, walk);
criterion_main!(benches);
