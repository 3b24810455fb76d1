use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use cbol_core::system::{Classifier, Decoder, Forecaster};
use cbol_core::{cbol_tune, LatentPoint, Objective, SyntheticSystem, TunerConfig, Weights};

fn bench_evaluate(c: &mut Criterion) {
    let system = SyntheticSystem::load_default().unwrap();
    let objective = Objective::new(Weights::step(), system.reference_intensity()).unwrap();
    let z = LatentPoint::new([-0.2, 0.1, -0.3, 0.2, 0.0, 0.3, -0.1, 0.05]).unwrap();
    c.bench_function("objective_evaluate", |b| {
        b.iter(|| objective.evaluate(&system, black_box(&z)))
    });
    let states = system.decode(&system.forecast(&z));
    c.bench_function("forecast_decode", |b| {
        b.iter(|| system.decode(&system.forecast(black_box(&z))))
    });
    c.bench_function("trajectory_passes", |b| {
        b.iter(|| system.trajectory_passes(black_box(&states)))
    });
}

fn bench_tune(c: &mut Criterion) {
    let system = SyntheticSystem::load_default().unwrap();
    let cfg = TunerConfig {
        iterations: 50,
        ..TunerConfig::default()
    };
    let objective = cfg.objective(system.reference_intensity()).unwrap();
    let mut group = c.benchmark_group("tune");
    group.sample_size(10);
    group.bench_function("50_iterations", |b| {
        b.iter(|| cbol_tune(&cfg, 0, &system, &objective).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_evaluate, bench_tune);
criterion_main!(benches);
