use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Monitor, StepReport, StepTiming, DMP_TOLERANCE};
use crate::error::{Error, Result};
use crate::grid::{sup_norm, Field};
use crate::potential::Potential;

use super::{SchemeConfig, Stepper};

/// Receives intermediate states of a run.
pub trait SnapshotSink {
    fn emit(&mut self, field: &Field, step: usize, time: f64) -> Result<()>;
}

impl<F> SnapshotSink for F
where
    F: FnMut(&Field, usize, f64) -> Result<()>,
{
    fn emit(&mut self, field: &Field, step: usize, time: f64) -> Result<()> {
        self(field, step, time)
    }
}

/// Keeps every emitted snapshot in memory.
#[derive(Clone, Debug, Default)]
pub struct SnapshotCollector {
    pub snapshots: Vec<(usize, f64, Field)>,
}

impl SnapshotSink for SnapshotCollector {
    fn emit(&mut self, field: &Field, step: usize, time: f64) -> Result<()> {
        self.snapshots.push((step, time, field.clone()));
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationOptions {
    /// Emit a snapshot every this many steps, starting with the initial
    /// state; 0 disables snapshots.
    pub snapshot_every: usize,
    /// Evaluate the monitors every this many steps (and at the last step).
    pub diag_every: usize,
    /// Stop with an error on the first failed monitor check.
    pub strict: bool,
    /// Record kernel wall time; when false `wall_time_ns` is always 0 so
    /// reruns produce identical reports.
    pub record_timing: bool,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            snapshot_every: 0,
            diag_every: 1,
            strict: true,
            record_timing: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub reports: Vec<StepReport>,
    pub initial_energy: f64,
    pub final_state: Field,
    pub steps: usize,
}

impl Trajectory {
    pub fn all_dmp_ok(&self) -> bool {
        self.reports.iter().all(|r| r.dmp_ok)
    }

    pub fn all_energy_decreasing(&self) -> bool {
        self.reports.iter().all(|r| r.energy_decreasing)
    }

    pub fn max_sup_norm(&self) -> f64 {
        self.reports.iter().map(|r| r.sup_norm).fold(0.0, f64::max)
    }

    pub fn max_newton_iters(&self) -> usize {
        self.reports
            .iter()
            .map(|r| r.solver_iterations_max)
            .max()
            .unwrap_or(0)
    }

    pub fn first_violation(&self) -> Option<&StepReport> {
        self.reports.iter().find(|r| r.violation().is_some())
    }
}

/// A run in progress; [`simulate`] drives one to completion.
pub struct Simulation<'a> {
    stepper: Stepper<'a, Potential>,
    state: Field,
    monitor: Monitor,
    opts: SimulationOptions,
    step: usize,
    total_steps: usize,
    pending_iters: usize,
    pending_ns: u64,
}

impl<'a> Simulation<'a> {
    /// Marches `round(t_end / τ)` steps from `u0`.
    pub fn new(
        u0: &Field,
        cfg: SchemeConfig,
        potential: &'a Potential,
        t_end: f64,
        opts: SimulationOptions,
    ) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::InvalidInput(format!("final time {t_end} must be positive")));
        }
        if opts.diag_every == 0 {
            return Err(Error::InvalidInput("diagnostics stride must be at least 1".into()));
        }
        if !u0.is_finite() {
            return Err(Error::InvalidInput("initial field has non-finite samples".into()));
        }
        let stepper = Stepper::new(u0.grid(), cfg, potential)?;
        if cfg.enforce_thresholds {
            let sup = sup_norm(u0);
            if sup > potential.beta() + DMP_TOLERANCE {
                return Err(Error::InitialBound {
                    sup_norm: sup,
                    beta: potential.beta(),
                });
            }
        }
        let total_steps = (t_end / cfg.tau).round() as usize;
        if total_steps == 0 {
            return Err(Error::InvalidInput(format!(
                "final time {t_end} is shorter than half a step {}",
                cfg.tau
            )));
        }
        let monitor = Monitor::new(u0, *potential, cfg.epsilon)?;
        Ok(Self {
            stepper,
            state: u0.clone(),
            monitor,
            opts,
            step: 0,
            total_steps,
            pending_iters: 0,
            pending_ns: 0,
        })
    }

    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn is_finished(&self) -> bool {
        self.step >= self.total_steps
    }

    pub fn state(&self) -> &Field {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.stepper.config().tau
    }

    pub fn initial_energy(&self) -> f64 {
        self.monitor.initial_energy()
    }

    /// Emits the initial snapshot, if snapshots are enabled.
    pub fn emit_initial(&self, sink: Option<&mut dyn SnapshotSink>) -> Result<()> {
        match sink {
            Some(sink) if self.opts.snapshot_every > 0 && self.step == 0 => {
                sink.emit(&self.state, 0, 0.0)
            }
            _ => Ok(()),
        }
    }

    /// Takes one step. Returns a report when the monitors ran on this step.
    pub fn advance(&mut self, sink: Option<&mut dyn SnapshotSink>) -> Result<Option<StepReport>> {
        if self.is_finished() {
            return Ok(None);
        }
        let start = self.opts.record_timing.then(Instant::now);
        let stats = self.stepper.step(&mut self.state)?;
        if let Some(start) = start {
            self.pending_ns += start.elapsed().as_nanos() as u64;
        }
        self.pending_iters = self.pending_iters.max(stats.newton_iters_max);
        self.step += 1;
        let time = self.time();

        if self.opts.snapshot_every > 0 && self.step.is_multiple_of(self.opts.snapshot_every) {
            if let Some(sink) = sink {
                sink.emit(&self.state, self.step, time)?;
            }
        }

        if !self.step.is_multiple_of(self.opts.diag_every) && !self.is_finished() {
            return Ok(None);
        }
        let timing = StepTiming {
            solver_iterations_max: self.pending_iters,
            wall_time_ns: self.pending_ns,
        };
        self.pending_iters = 0;
        self.pending_ns = 0;
        let report = self.monitor.observe(&self.state, self.step, time, timing)?;
        if self.opts.strict {
            report.check()?;
        }
        Ok(Some(report))
    }

    pub fn into_state(self) -> Field {
        self.state
    }
}

fn reborrow<'a>(sink: &'a mut Option<&mut dyn SnapshotSink>) -> Option<&'a mut dyn SnapshotSink> {
    match sink {
        Some(s) => Some(&mut **s),
        None => None,
    }
}

/// Runs a full simulation and collects the per-step reports. The reported
/// wall time covers the scheme kernel only.
pub fn simulate(
    u0: &Field,
    cfg: SchemeConfig,
    potential: &Potential,
    t_end: f64,
    opts: SimulationOptions,
    mut sink: Option<&mut dyn SnapshotSink>,
) -> Result<Trajectory> {
    let mut sim = Simulation::new(u0, cfg, potential, t_end, opts)?;
    sim.emit_initial(reborrow(&mut sink))?;
    let mut times = Vec::new();
    let mut reports = Vec::new();
    while !sim.is_finished() {
        if let Some(report) = sim.advance(reborrow(&mut sink))? {
            times.push(report.time);
            reports.push(report);
        }
    }
    let initial_energy = sim.initial_energy();
    let steps = sim.steps_taken();
    Ok(Trajectory {
        times,
        reports,
        initial_energy,
        final_state: sim.into_state(),
        steps,
    })
}
