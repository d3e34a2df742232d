//! Independent simulations run side by side.
//!
//! With the `parallel` feature (on by default) the jobs are spread over the
//! rayon thread pool; without it they run one after another. Results come
//! back in job order either way, and each job is deterministic, so the two
//! paths produce identical output.

use crate::error::Result;
use crate::grid::Field;
use crate::potential::Potential;
use crate::scheme::{simulate, SchemeConfig, SimulationOptions, Trajectory};

/// Maps `func` over `items`, in parallel when the `parallel` feature is on.
pub fn par_map<T, R, F>(items: &[T], func: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(func).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(func).collect()
    }
}

/// One simulation of a batch.
#[derive(Clone, Debug)]
pub struct Job {
    pub initial: Field,
    pub config: SchemeConfig,
    pub potential: Potential,
    pub t_end: f64,
    pub options: SimulationOptions,
}

impl Job {
    pub fn run(&self) -> Result<Trajectory> {
        simulate(
            &self.initial,
            self.config,
            &self.potential,
            self.t_end,
            self.options,
            None,
        )
    }
}

/// Runs every job; parallel when the `parallel` feature is on.
pub fn run_batch(jobs: &[Job]) -> Vec<Result<Trajectory>> {
    par_map(jobs, Job::run)
}

/// Runs every job on the calling thread.
pub fn run_batch_sequential(jobs: &[Job]) -> Vec<Result<Trajectory>> {
    jobs.iter().map(Job::run).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::scheme::SchemeKind;

    #[test]
    fn par_map_keeps_order() {
        let items: Vec<usize> = (0..257).collect();
        let out = par_map(&items, |x| x * x);
        assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
    }

    #[test]
    fn batch_matches_sequential() {
        let g = Grid::two_d(16, 1.0).unwrap();
        let opts = SimulationOptions {
            record_timing: false,
            ..Default::default()
        };
        let jobs: Vec<Job> = SchemeKind::ALL
            .iter()
            .enumerate()
            .map(|(n, &scheme)| Job {
                initial: Field::from_fn(g, |x| {
                    0.5 * (2.0 * std::f64::consts::PI * (x[0] + n as f64 * x[1])).sin()
                }),
                config: SchemeConfig::new(scheme, 1e-3, 0.05, 2.0),
                potential: Potential::poly(),
                t_end: 0.01,
                options: opts,
            })
            .collect();
        let a = run_batch(&jobs);
        let b = run_batch_sequential(&jobs);
        for (x, y) in a.iter().zip(&b) {
            let (x, y) = (x.as_ref().unwrap(), y.as_ref().unwrap());
            assert_eq!(x.final_state.as_slice(), y.final_state.as_slice());
            assert_eq!(x.reports.len(), y.reports.len());
        }
    }
}
