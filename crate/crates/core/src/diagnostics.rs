//! Discrete free energy, the κ-weighted norm, and per-step monitors for the
//! maximum bound and energy monotonicity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{forward_gradient, l2_norm, sup_norm, Field};
use crate::potential::Potential;

/// Slack on the maximum bound check.
pub const DMP_TOLERANCE: f64 = 1e-12;
/// Relative slack on the energy monotonicity check.
pub const ENERGY_TOLERANCE: f64 = 1e-10;

/// Header of the comma-separated diagnostics table.
pub const CSV_HEADER: &str =
    "step,t,energy,sup_norm,energy_delta,dmp_ok,energy_decreasing,newton_iters_max,wall_ns";

/// `E_h(u) = ε²/2 ‖∇_h u‖² + ⟨F(u), 1⟩`.
pub fn discrete_energy(u: &Field, potential: &Potential, epsilon: f64) -> Result<f64> {
    let gradient = forward_gradient(u).norm_squared();
    let mut bulk = 0.0;
    for &v in u.as_slice() {
        bulk += potential.bulk_energy(v)?;
    }
    Ok(0.5 * epsilon * epsilon * gradient + bulk * u.grid().cell_volume())
}

/// `‖v‖_κ = sqrt(ε²/2 ‖∇_h v‖² + κ ‖v‖²)`.
pub fn kappa_norm(v: &Field, epsilon: f64, kappa: f64) -> f64 {
    let g = forward_gradient(v).norm_squared();
    let l2 = l2_norm(v);
    (0.5 * epsilon * epsilon * g + kappa * l2 * l2).sqrt()
}

/// Solver and timing data the monitor cannot derive from the fields.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepTiming {
    pub solver_iterations_max: usize,
    pub wall_time_ns: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step_index: usize,
    pub time: f64,
    pub energy: f64,
    pub sup_norm: f64,
    pub energy_delta: f64,
    pub dmp_ok: bool,
    pub energy_decreasing: bool,
    pub solver_iterations_max: usize,
    pub wall_time_ns: u64,
}

impl StepReport {
    fn build(
        previous_energy: f64,
        next: &Field,
        potential: &Potential,
        epsilon: f64,
        step_index: usize,
        time: f64,
        timing: StepTiming,
    ) -> Result<Self> {
        let sup = sup_norm(next);
        let energy = discrete_energy(next, potential, epsilon)?;
        let energy_delta = energy - previous_energy;
        Ok(Self {
            step_index,
            time,
            energy,
            sup_norm: sup,
            energy_delta,
            dmp_ok: sup <= potential.beta() + DMP_TOLERANCE,
            energy_decreasing: energy_delta <= ENERGY_TOLERANCE * energy.abs().max(1.0),
            solver_iterations_max: timing.solver_iterations_max,
            wall_time_ns: timing.wall_time_ns,
        })
    }

    /// Description of the first failed check, if any.
    pub fn violation(&self) -> Option<String> {
        if !self.dmp_ok {
            Some(format!("sup norm {} exceeds the maximum bound", self.sup_norm))
        } else if !self.energy_decreasing {
            Some(format!("energy increased by {:e}", self.energy_delta))
        } else {
            None
        }
    }

    /// Strict-mode check.
    pub fn check(&self) -> Result<()> {
        match self.violation() {
            None => Ok(()),
            Some(what) => Err(Error::MonitorViolation {
                step: self.step_index,
                time: self.time,
                what,
            }),
        }
    }

    /// One row of the diagnostics table, matching [`CSV_HEADER`].
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.step_index,
            self.time,
            self.energy,
            self.sup_norm,
            self.energy_delta,
            self.dmp_ok,
            self.energy_decreasing,
            self.solver_iterations_max,
            self.wall_time_ns
        )
    }
}

/// Compares two consecutive states of one trajectory.
pub fn monitor(
    prev: &Field,
    next: &Field,
    potential: &Potential,
    epsilon: f64,
    step_index: usize,
    time: f64,
    timing: StepTiming,
) -> Result<StepReport> {
    prev.check_same_grid(next)?;
    let previous_energy = discrete_energy(prev, potential, epsilon)?;
    StepReport::build(previous_energy, next, potential, epsilon, step_index, time, timing)
}

/// Running monitor that keeps the last energy so each step costs one
/// energy evaluation.
#[derive(Clone, Debug)]
pub struct Monitor {
    potential: Potential,
    epsilon: f64,
    last_energy: f64,
    initial_energy: f64,
}

impl Monitor {
    pub fn new(initial: &Field, potential: Potential, epsilon: f64) -> Result<Self> {
        let e = discrete_energy(initial, &potential, epsilon)?;
        Ok(Self {
            potential,
            epsilon,
            last_energy: e,
            initial_energy: e,
        })
    }

    pub fn initial_energy(&self) -> f64 {
        self.initial_energy
    }

    pub fn observe(
        &mut self,
        next: &Field,
        step_index: usize,
        time: f64,
        timing: StepTiming,
    ) -> Result<StepReport> {
        let report = StepReport::build(
            self.last_energy,
            next,
            &self.potential,
            self.epsilon,
            step_index,
            time,
            timing,
        )?;
        self.last_energy = report.energy;
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::grid::Grid;

    #[test]
    fn energy_of_pure_phases() {
        let g = Grid::two_d(16, 1.0).unwrap();
        let p = Potential::poly();
        assert_eq!(discrete_energy(&Field::constant(g, 1.0), &p, 0.3).unwrap(), 0.0);
        assert!((discrete_energy(&Field::zeros(g), &p, 0.3).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn energy_matches_direct_summation() {
        let m = 256;
        let eps = 0.1;
        let g = Grid::one_d(m, 1.0).unwrap();
        let u = Field::from_fn(g, |x| (2.0 * PI * x[0]).sin());
        let h = 1.0 / m as f64;
        let mut direct = 0.0;
        for i in 0..m {
            let a = (2.0 * PI * i as f64 * h).sin();
            let b = (2.0 * PI * ((i + 1) % m) as f64 * h).sin();
            let d = (b - a) / h;
            direct += h * (0.5 * eps * eps * d * d + 0.25 * (a * a - 1.0).powi(2));
        }
        let e = discrete_energy(&u, &Potential::poly(), eps).unwrap();
        assert!((e - direct).abs() < 1e-12, "{e} vs {direct}");
    }

    #[test]
    fn log_energy_outside_domain_fails() {
        let g = Grid::one_d(4, 1.0).unwrap();
        let u = Field::constant(g, 1.0);
        assert!(discrete_energy(&u, &Potential::log_default(), 0.1).is_err());
    }

    #[test]
    fn energy_is_shift_invariant() {
        let g = Grid::two_d(12, 2.0).unwrap();
        let u = Field::from_fn(g, |x| 0.5 * (3.1 * x[0]).sin() * (1.7 * x[1] + 0.3).cos());
        let p = Potential::log_default();
        let e0 = discrete_energy(&u, &p, 0.2).unwrap();
        for off in [[1, 0], [0, 5], [7, 3]] {
            let e1 = discrete_energy(&u.rotated(off), &p, 0.2).unwrap();
            assert!((e0 - e1).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_norm_examples() {
        let g = Grid::two_d(8, 1.0).unwrap();
        assert_eq!(kappa_norm(&Field::zeros(g), 0.5, 2.0), 0.0);
        let v = Field::from_fn(g, |x| (x[0] * 5.0).sin() + x[1]);
        assert!((kappa_norm(&v, 0.0, 1.0) - l2_norm(&v)).abs() < 1e-14);
        let (eps, kappa) = (0.3, 2.5);
        let q = kappa_norm(&v, eps, kappa).powi(2)
            - 0.5 * eps * eps * forward_gradient(&v).norm_squared()
            - kappa * l2_norm(&v).powi(2);
        assert!(q.abs() < 1e-12);
    }

    #[test]
    fn monitor_flags() {
        let g = Grid::two_d(8, 1.0).unwrap();
        let p = Potential::poly();
        let z = Field::zeros(g);
        let r = monitor(&z, &z, &p, 0.1, 1, 0.1, StepTiming::default()).unwrap();
        assert_eq!(r.energy_delta, 0.0);
        assert!(r.dmp_ok && r.energy_decreasing);
        assert!(r.check().is_ok());

        let saturated = Field::from_fn(g, |x| if x[0] < 0.5 { 1.0 } else { -1.0 });
        let inflated = saturated.map(|v| 1.1 * v);
        let r = monitor(&saturated, &inflated, &p, 0.1, 2, 0.2, StepTiming::default()).unwrap();
        assert!(!r.dmp_ok);
        assert!(matches!(r.check(), Err(Error::MonitorViolation { step: 2, .. })));
    }

    #[test]
    fn csv_row_has_header_arity() {
        let g = Grid::one_d(4, 1.0).unwrap();
        let mut m = Monitor::new(&Field::zeros(g), Potential::poly(), 0.1).unwrap();
        let r = m
            .observe(&Field::zeros(g), 1, 0.5, StepTiming { solver_iterations_max: 3, wall_time_ns: 17 })
            .unwrap();
        assert_eq!(r.csv_row().split(',').count(), CSV_HEADER.split(',').count());
        assert!(r.csv_row().ends_with(",3,17"));
    }
}
