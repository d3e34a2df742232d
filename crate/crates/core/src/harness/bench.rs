//! Per-step cost measurements.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::Potential;
use crate::scheme::{max_stable_tau, NonlinearSolver, SchemeConfig, SchemeKind, Stepper};

use super::ic::ic_eight_circles;

const WARMUP_STEPS: usize = 2;
/// Interface width of the benchmark problem (eight circles on `(0, 2π)²`).
pub const BENCH_EPSILON: f64 = 0.05;

/// One timed configuration: a scheme and the per-point solver it uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchVariant {
    pub scheme: SchemeKind,
    pub solver: NonlinearSolver,
}

impl BenchVariant {
    pub fn new(scheme: SchemeKind) -> Self {
        Self {
            scheme,
            solver: NonlinearSolver::Newton,
        }
    }

    pub fn label(&self) -> String {
        match self.solver {
            NonlinearSolver::Newton => self.scheme.token().to_string(),
            NonlinearSolver::Cardano => format!("{}+cardano", self.scheme.token()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub sizes: Vec<usize>,
    pub dim: usize,
    pub tau: f64,
    /// Median wall time of one step, per variant label, in `sizes` order.
    pub per_step_ns: BTreeMap<String, Vec<f64>>,
    /// Least-squares slope of `log(time)` against `log(M^dim)`.
    pub fitted_exponent: BTreeMap<String, f64>,
}

impl BenchResult {
    /// `M,scheme,ns_per_step` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("M,scheme,ns_per_step\n");
        for (label, times) in &self.per_step_ns {
            for (m, t) in self.sizes.iter().zip(times) {
                let _ = writeln!(out, "{m},{label},{t:.0}");
            }
        }
        out
    }

    /// `scheme,exponent` rows.
    pub fn exponents_csv(&self) -> String {
        let mut out = String::from("scheme,exponent\n");
        for (label, e) in &self.fitted_exponent {
            let _ = writeln!(out, "{label},{e:.4}");
        }
        out
    }
}

/// Slope of the least-squares line through `(x, y)`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// A step size inside every scheme's limit on the finest grid.
pub fn bench_tau(potential: &Potential, dim: usize, finest: usize) -> Result<f64> {
    let grid = Grid::new(dim, finest, 2.0 * PI)?;
    let mut tau = f64::INFINITY;
    for scheme in SchemeKind::SWEEPS {
        tau = tau.min(max_stable_tau(scheme, &grid, BENCH_EPSILON, potential, potential.kappa())?);
    }
    // a power of two keeps the arithmetic identical across sizes
    Ok(2f64.powi((0.5 * tau).log2().floor() as i32))
}

/// Times `steps` single steps (after two warm-up steps) of every variant on
/// the eight-circles data for each `M`, one cell at a time on the calling
/// thread. Diagnostics are not evaluated.
pub fn bench_per_step(
    variants: &[BenchVariant],
    sizes: &[usize],
    potential: &Potential,
    dim: usize,
    steps: usize,
) -> Result<BenchResult> {
    if steps < 5 {
        return Err(Error::InvalidInput("at least 5 timed steps per cell".into()));
    }
    if sizes.len() < 2 {
        return Err(Error::InvalidInput("at least two sizes to fit an exponent".into()));
    }
    let finest = *sizes.iter().max().expect("non-empty");
    let tau = bench_tau(potential, dim, finest)?;
    let mut per_step_ns = BTreeMap::new();
    let mut fitted_exponent = BTreeMap::new();
    for variant in variants {
        let mut times = Vec::with_capacity(sizes.len());
        for &m in sizes {
            let grid = Grid::new(dim, m, 2.0 * PI)?;
            let mut u = if dim == 2 {
                ic_eight_circles(&grid, BENCH_EPSILON)?
            } else {
                crate::grid::Field::from_fn(grid, |x| 0.5 * x[0].sin())
            };
            let cfg = SchemeConfig::new(variant.scheme, tau, BENCH_EPSILON, potential.kappa())
                .with_solver(variant.solver);
            let mut stepper = Stepper::new(&grid, cfg, potential)?;
            for _ in 0..WARMUP_STEPS {
                stepper.step(&mut u)?;
            }
            let mut samples = Vec::with_capacity(steps);
            for _ in 0..steps {
                let start = Instant::now();
                stepper.step(&mut u)?;
                samples.push(start.elapsed().as_nanos() as f64);
            }
            times.push(median(samples));
        }
        let x: Vec<f64> = sizes.iter().map(|&m| (m as f64).powi(dim as i32).ln()).collect();
        let y: Vec<f64> = times.iter().map(|t| t.ln()).collect();
        fitted_exponent.insert(variant.label(), least_squares_slope(&x, &y));
        per_step_ns.insert(variant.label(), times);
    }
    Ok(BenchResult {
        sizes: sizes.to_vec(),
        dim,
        tau,
        per_step_ns,
        fitted_exponent,
    })
}
