//! A refinement-style batch of independent runs, on the rayon pool and on
//! one thread. Build with `--no-default-features` to make `run_batch`
//! sequential as well.

use criterion::{criterion_group, criterion_main, Criterion};
use saulyev::batch::{run_batch, run_batch_sequential, Job};
use saulyev::harness::ic_sinesine;
use saulyev::scheme::{SchemeConfig, SchemeKind, SimulationOptions};
use saulyev::{Grid, Potential};

fn jobs() -> Vec<Job> {
    let grid = Grid::two_d(64, 1.0).unwrap();
    let u0 = ic_sinesine(&grid).unwrap();
    let p = Potential::poly();
    let options = SimulationOptions {
        diag_every: 16,
        record_timing: false,
        ..Default::default()
    };
    (6..=9)
        .flat_map(|k| SchemeKind::SWEEPS.map(|s| (s, 2f64.powi(-k))))
        .map(|(scheme, tau)| Job {
            initial: u0.clone(),
            config: SchemeConfig::new(scheme, tau, 0.01, p.kappa()),
            potential: p,
            t_end: 0.0625,
            options,
        })
        .collect()
}

fn batch(c: &mut Criterion) {
    let jobs = jobs();
    let mut group = c.benchmark_group("batch");
    group.sample_size(10);
    group.bench_function("run_batch", |b| b.iter(|| run_batch(&jobs)));
    group.bench_function("sequential", |b| b.iter(|| run_batch_sequential(&jobs)));
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
