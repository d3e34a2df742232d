use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use saulyev::harness::bench::{bench_tau, BENCH_EPSILON};
use saulyev::harness::ic_eight_circles;
use saulyev::scheme::{NonlinearSolver, SchemeConfig, SchemeKind, Stepper};
use saulyev::{Grid, Potential};

fn per_step(c: &mut Criterion) {
    let p = Potential::poly();
    let sizes = [128, 256, 512];
    let tau = bench_tau(&p, 2, *sizes.iter().max().unwrap()).unwrap();
    let mut group = c.benchmark_group("step");
    group.sample_size(20);
    let variants = SchemeKind::ALL
        .iter()
        .map(|&s| (s, NonlinearSolver::Newton))
        .chain([(SchemeKind::Ess1Adjoint, NonlinearSolver::Cardano)]);
    for (scheme, solver) in variants {
        let label = match solver {
            NonlinearSolver::Newton => scheme.token().to_string(),
            NonlinearSolver::Cardano => format!("{scheme}+cardano"),
        };
        for m in sizes {
            let grid = Grid::two_d(m, 2.0 * PI).unwrap();
            let u0 = ic_eight_circles(&grid, BENCH_EPSILON).unwrap();
            let cfg = SchemeConfig::new(scheme, tau, BENCH_EPSILON, p.kappa()).with_solver(solver);
            let mut stepper = Stepper::new(&grid, cfg, &p).unwrap();
            group.throughput(Throughput::Elements(grid.len() as u64));
            group.bench_with_input(BenchmarkId::new(&label, m), &m, |b, _| {
                let mut u = u0.clone();
                b.iter(|| stepper.step(&mut u).unwrap());
            });
        }
    }
    group.finish();
}

criterion_group!(benches, per_step);
criterion_main!(benches);
