//! Convergence studies: time-step and mesh refinement with order estimates.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::batch::par_map;
use crate::error::{Error, Result};
use crate::grid::{l2_norm, Field, Grid};
use crate::potential::{Nonlinearity, Potential};
use crate::scheme::{max_stable_tau, NonlinearSolver, SchemeConfig, SchemeKind, Stepper};

/// Pairwise `log₂(e_k / e_{k+1})`, for ladders that halve the control value.
pub fn estimate_order(errors: &[f64]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Err(Error::InvalidInput("need at least two errors".into()));
    }
    if let Some(&e) = errors.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidInput(format!("error {e} is not positive")));
    }
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

/// A refinement cell left out of the study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub control: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementResult {
    /// τ or h, coarsest first.
    pub control_values: Vec<f64>,
    /// Discrete L² error at the final time.
    pub errors: Vec<f64>,
    /// `log(e_k / e_{k+1}) / log(c_k / c_{k+1})`; equal to the log₂ ratio on
    /// halving ladders. One fewer entry than `errors`.
    pub orders: Vec<f64>,
    /// Cells above the step-size limit that ran anyway (`allow_unstable`).
    pub unstable: Vec<f64>,
    pub skipped: Vec<SkippedCell>,
}

impl RefinementResult {
    fn from_cells(cells: Vec<(f64, f64)>, unstable: Vec<f64>, skipped: Vec<SkippedCell>) -> Self {
        let orders = cells
            .windows(2)
            .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
            .collect();
        let (control_values, errors) = cells.into_iter().unzip();
        Self {
            control_values,
            errors,
            orders,
            unstable,
            skipped,
        }
    }

    /// Mean order over the last three cells (the last two ratios).
    pub fn asymptotic_order(&self) -> Option<f64> {
        let n = self.orders.len();
        if n == 0 {
            return None;
        }
        let tail = &self.orders[n.saturating_sub(2)..];
        Some(tail.iter().sum::<f64>() / tail.len() as f64)
    }

    /// Whether the errors decrease strictly over the last three cells.
    pub fn tail_monotone(&self) -> bool {
        let n = self.errors.len();
        self.errors[n.saturating_sub(3)..]
            .windows(2)
            .all(|w| w[1] < w[0])
    }

    /// `control,error,order` rows; the first row has an empty order.
    pub fn to_csv(&self, control_name: &str) -> String {
        let mut out = format!("{control_name},error,order\n");
        for (k, (c, e)) in self.control_values.iter().zip(&self.errors).enumerate() {
            let order = match k {
                0 => String::new(),
                _ => format!("{:.4}", self.orders[k - 1]),
            };
            let _ = writeln!(out, "{c:e},{e:e},{order}");
        }
        out
    }
}

/// Parameters shared by every cell of a study.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudySetup {
    pub potential: Potential,
    pub epsilon: f64,
    pub kappa: f64,
    pub t_end: f64,
    pub solver: NonlinearSolver,
    /// Run cells above the step-size limit instead of skipping them.
    pub allow_unstable: bool,
}

impl StudySetup {
    pub fn new(potential: Potential, epsilon: f64, t_end: f64) -> Self {
        Self {
            potential,
            epsilon,
            kappa: potential.kappa(),
            t_end,
            solver: NonlinearSolver::Newton,
            allow_unstable: false,
        }
    }

    pub fn config(&self, scheme: SchemeKind, tau: f64) -> SchemeConfig {
        let cfg = SchemeConfig::new(scheme, tau, self.epsilon, self.kappa).with_solver(self.solver);
        if self.allow_unstable {
            cfg.unchecked()
        } else {
            cfg
        }
    }
}

/// Steps `u0` to `t_end`, which must be a whole number of steps.
pub fn march<N: Nonlinearity + ?Sized>(
    u0: &Field,
    cfg: SchemeConfig,
    nl: &N,
    t_end: f64,
) -> Result<Field> {
    let steps = (t_end / cfg.tau).round();
    if steps < 1.0 || (steps * cfg.tau - t_end).abs() > 1e-9 * t_end {
        return Err(Error::InvalidInput(format!(
            "t_end = {t_end} is not a whole number of steps of {}",
            cfg.tau
        )));
    }
    let mut stepper = Stepper::new(u0.grid(), cfg, nl)?;
    let mut u = u0.clone();
    for _ in 0..steps as usize {
        stepper.step(&mut u)?;
    }
    Ok(u)
}

enum Cell {
    Done { control: f64, error: f64, unstable: bool },
    Skipped(SkippedCell),
}

fn classify(
    scheme: SchemeKind,
    setup: &StudySetup,
    grid: &Grid,
    tau: f64,
    control: f64,
) -> Result<std::result::Result<bool, SkippedCell>> {
    let limit = max_stable_tau(scheme, grid, setup.epsilon, &setup.potential, setup.kappa)?;
    if tau <= limit {
        return Ok(Ok(false));
    }
    if setup.allow_unstable {
        return Ok(Ok(true));
    }
    Ok(Err(SkippedCell {
        control,
        reason: format!("τ = {tau:e} exceeds the limit {limit:e} on M = {}", grid.points()),
    }))
}

fn collect(cells: Vec<Result<Cell>>) -> Result<RefinementResult> {
    let mut done = Vec::new();
    let mut unstable = Vec::new();
    let mut skipped = Vec::new();
    for cell in cells {
        match cell? {
            Cell::Done {
                control,
                error,
                unstable: u,
            } => {
                if u {
                    unstable.push(control);
                }
                done.push((control, error));
            }
            Cell::Skipped(s) => skipped.push(s),
        }
    }
    Ok(RefinementResult::from_cells(done, unstable, skipped))
}

/// Runs `scheme` from `initial` with every step in `taus` (coarsest first)
/// and measures the L² distance to `reference` at `setup.t_end`. Cells above
/// the step-size limit are skipped and listed unless `allow_unstable` is set.
pub fn temporal_refinement(
    scheme: SchemeKind,
    setup: &StudySetup,
    initial: &Field,
    taus: &[f64],
    reference: &Field,
) -> Result<RefinementResult> {
    initial.check_same_grid(reference)?;
    let grid = *initial.grid();
    let cells = par_map(taus, |&tau| -> Result<Cell> {
        match classify(scheme, setup, &grid, tau, tau)? {
            Err(skip) => Ok(Cell::Skipped(skip)),
            Ok(unstable) => {
                let cfg = setup.config(scheme, tau);
                let u = march(initial, cfg, &setup.potential, setup.t_end)?;
                Ok(Cell::Done {
                    control: tau,
                    error: l2_norm(&u.difference(reference)?),
                    unstable,
                })
            }
        }
    });
    collect(cells)
}

/// Builds the initial state on each grid.
pub trait InitialData: Sync {
    fn sample(&self, grid: &Grid) -> Result<Field>;
}

impl<F> InitialData for F
where
    F: Fn(&Grid) -> Result<Field> + Sync,
{
    fn sample(&self, grid: &Grid) -> Result<Field> {
        self(grid)
    }
}

/// Mesh refinement at fixed `tau`: each coarse run is compared with the run
/// on `fine_points` nodes restricted to the coarse nodes. Returns the study
/// and the fine reference.
#[allow(clippy::too_many_arguments)]
pub fn spatial_refinement(
    scheme: SchemeKind,
    setup: &StudySetup,
    initial: &dyn InitialData,
    dim: usize,
    length: f64,
    tau: f64,
    points: &[usize],
    fine_points: usize,
) -> Result<(RefinementResult, Field)> {
    let fine = Grid::new(dim, fine_points, length)?;
    for &m in points {
        if m > fine_points || !fine_points.is_multiple_of(m) {
            return Err(Error::NonNesting {
                coarse: m,
                fine: fine_points,
            });
        }
    }
    if let Err(skip) = classify(scheme, setup, &fine, tau, fine.spacing())? {
        return Err(Error::InvalidInput(skip.reason));
    }
    let cfg = setup.config(scheme, tau);
    let reference = march(&initial.sample(&fine)?, cfg, &setup.potential, setup.t_end)?;
    let cells = par_map(points, |&m| -> Result<Cell> {
        let grid = Grid::new(dim, m, length)?;
        let unstable = classify(scheme, setup, &grid, tau, grid.spacing())?
            .map_err(|s| Error::InvalidInput(s.reason))?;
        let u = march(&initial.sample(&grid)?, cfg, &setup.potential, setup.t_end)?;
        let exact = reference.restrict_to(&grid)?;
        Ok(Cell::Done {
            control: grid.spacing(),
            error: l2_norm(&u.difference(&exact)?),
            unstable,
        })
    });
    Ok((collect(cells)?, reference))
}
