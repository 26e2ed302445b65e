use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cellmend::experiments::{compute_fig3, compute_fig5, ExperimentId, ExperimentSpec};
use cellmend::par::Execution;
use cellmend::resample::{knn_minority_with, smote_with, ResampleConfig};
use cellmend::simulate::{default_scenario, generate_dataset_with, SimConfig};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn kernels(c: &mut Criterion) {
    let cfg = SimConfig { n_fault: 2000, n_ok: 20000, seed: 1, ..default_scenario() };
    let data = generate_dataset_with(&cfg, Execution::Sequential).unwrap();
    let rcfg = ResampleConfig { target_ratio: 1.0, ..Default::default() };

    let mut g = c.benchmark_group("kernels");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("simulate", name), &exec, |b, &e| {
            b.iter(|| generate_dataset_with(&cfg, e).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("knn", name), &exec, |b, &e| {
            b.iter(|| knn_minority_with(&data, 5, e).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("smote", name), &exec, |b, &e| {
            b.iter(|| smote_with(&data, &rcfg, e).unwrap())
        });
    }
    g.finish();
}

fn experiments(c: &mut Criterion) {
    let mut g = c.benchmark_group("experiments");
    g.sample_size(10);
    for (name, exec) in MODES {
        for id in [ExperimentId::Fig3, ExperimentId::Fig5] {
            let mut spec = ExperimentSpec::new(id, "unused");
            spec.seeds = (1..=4).collect();
            spec.exec = exec;
            let label = format!("{id:?}").to_lowercase();
            g.bench_with_input(BenchmarkId::new(label, name), &spec, |b, s| match id {
                ExperimentId::Fig3 => b.iter(|| compute_fig3(s).unwrap()),
                _ => b.iter(|| compute_fig5(s).unwrap()),
            });
        }
    }
    g.finish();
}

criterion_group!(benches, kernels, experiments);
criterion_main!(benches);
