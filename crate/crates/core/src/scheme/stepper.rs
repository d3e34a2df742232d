use crate::baseline::spectral::{SpectralPlan, SpectralWork};
use crate::diagnostics::DMP_TOLERANCE;
use crate::error::{Error, Result};
use crate::grid::{sup_norm, Field, Grid};
use crate::potential::Nonlinearity;

use super::sweep::{backward_sweep, forward_sweep, SweepCoefficients};
use super::{SchemeConfig, SchemeKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    /// Largest per-node Newton iteration count in the step (0 for explicit
    /// sweeps and the closed-form solver).
    pub newton_iters_max: usize,
    pub clamped: bool,
}

impl StepStats {
    fn merge(self, other: StepStats) -> StepStats {
        StepStats {
            newton_iters_max: self.newton_iters_max.max(other.newton_iters_max),
            clamped: self.clamped || other.clamped,
        }
    }
}

/// A validated scheme bound to one grid and reaction term, reusable across
/// steps.
pub struct Stepper<'a, N: Nonlinearity + ?Sized> {
    grid: Grid,
    cfg: SchemeConfig,
    nl: &'a N,
    full: SweepCoefficients,
    half: SweepCoefficients,
    clamp: f64,
    spectral: Option<(SpectralPlan, SpectralWork)>,
}

impl<'a, N: Nonlinearity + ?Sized> Stepper<'a, N> {
    pub fn new(grid: &Grid, cfg: SchemeConfig, nl: &'a N) -> Result<Self> {
        cfg.validate(grid, nl)?;
        let ratio = cfg.diffusion_ratio(grid);
        let spectral = match cfg.scheme {
            SchemeKind::Ssi1 => {
                let plan = SpectralPlan::new(grid);
                let work = plan.work();
                Some((plan, work))
            }
            _ => None,
        };
        Ok(Self {
            grid: *grid,
            cfg,
            nl,
            full: SweepCoefficients::new(cfg.tau, cfg.kappa, ratio, grid.dim()),
            half: SweepCoefficients::new(0.5 * cfg.tau, cfg.kappa, ratio, grid.dim()),
            clamp: if cfg.enforce_thresholds {
                nl.bound()
            } else {
                nl.domain_limit()
            },
            spectral,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn forward(&self, buf: &mut [f64], c: &SweepCoefficients) -> Result<StepStats> {
        forward_sweep(buf, &self.grid, c, self.nl)?;
        Ok(StepStats::default())
    }

    fn backward(&self, buf: &mut [f64], c: &SweepCoefficients) -> Result<StepStats> {
        let (newton_iters_max, clamped) = backward_sweep(
            buf,
            &self.grid,
            c,
            self.nl,
            self.cfg.nonlinear_solver,
            &self.cfg.newton,
            self.clamp,
        )?;
        Ok(StepStats {
            newton_iters_max,
            clamped,
        })
    }

    fn check_grid(&self, u: &Field) -> Result<()> {
        if u.grid() == &self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Advances `u` by one time step in place.
    pub fn step(&mut self, u: &mut Field) -> Result<StepStats> {
        self.check_grid(u)?;
        let buf = u.as_mut_slice();
        match self.cfg.scheme {
            SchemeKind::Ess1 => self.forward(buf, &self.full),
            SchemeKind::Ess1Adjoint => self.backward(buf, &self.full),
            SchemeKind::Ss2 => {
                let first = self.forward(buf, &self.half)?;
                Ok(first.merge(self.backward(buf, &self.half)?))
            }
            SchemeKind::Ss2Adjoint => {
                let first = self.backward(buf, &self.half)?;
                Ok(first.merge(self.forward(buf, &self.half)?))
            }
            SchemeKind::Ssi1 => {
                let (plan, work) = self.spectral.as_mut().expect("plan built for ssi1");
                plan.step_in_place(buf, &self.cfg, self.nl, work)?;
                Ok(StepStats::default())
            }
        }
    }

    /// Like [`Stepper::step`], also returning the state after the first half
    /// step of the composed schemes.
    pub fn step_with_intermediate(&mut self, u: &mut Field) -> Result<(StepStats, Option<Field>)> {
        self.check_grid(u)?;
        match self.cfg.scheme {
            SchemeKind::Ss2 | SchemeKind::Ss2Adjoint => {
                let forward_first = self.cfg.scheme == SchemeKind::Ss2;
                let buf = u.as_mut_slice();
                let first = if forward_first {
                    self.forward(buf, &self.half)?
                } else {
                    self.backward(buf, &self.half)?
                };
                let mid = u.clone();
                let buf = u.as_mut_slice();
                let second = if forward_first {
                    self.backward(buf, &self.half)?
                } else {
                    self.forward(buf, &self.half)?
                };
                Ok((first.merge(second), Some(mid)))
            }
            _ => Ok((self.step(u)?, None)),
        }
    }
}

fn prepare<N: Nonlinearity + ?Sized>(
    scheme: SchemeKind,
    u: &Field,
    cfg: &SchemeConfig,
    nl: &N,
) -> Result<SchemeConfig> {
    let cfg = cfg.with_scheme(scheme);
    if cfg.enforce_thresholds {
        let sup = sup_norm(u);
        if sup > nl.bound() + DMP_TOLERANCE {
            return Err(Error::InitialBound {
                sup_norm: sup,
                beta: nl.bound(),
            });
        }
    }
    Ok(cfg)
}

fn single_step<N: Nonlinearity + ?Sized>(
    scheme: SchemeKind,
    u: &Field,
    cfg: &SchemeConfig,
    nl: &N,
) -> Result<Field> {
    let cfg = prepare(scheme, u, cfg, nl)?;
    let mut out = u.clone();
    Stepper::new(u.grid(), cfg, nl)?.step(&mut out)?;
    Ok(out)
}

/// One forward sweep, whatever `cfg.scheme` says.
pub fn step_ess1<N: Nonlinearity + ?Sized>(u: &Field, cfg: &SchemeConfig, nl: &N) -> Result<Field> {
    single_step(SchemeKind::Ess1, u, cfg, nl)
}

/// One backward implicit sweep.
pub fn step_ess1_adjoint<N: Nonlinearity + ?Sized>(
    u: &Field,
    cfg: &SchemeConfig,
    nl: &N,
) -> Result<Field> {
    single_step(SchemeKind::Ess1Adjoint, u, cfg, nl)
}

/// Forward half step followed by the backward half step.
pub fn step_ss2<N: Nonlinearity + ?Sized>(u: &Field, cfg: &SchemeConfig, nl: &N) -> Result<Field> {
    single_step(SchemeKind::Ss2, u, cfg, nl)
}

/// Backward half step followed by the forward half step.
pub fn step_ss2_adjoint<N: Nonlinearity + ?Sized>(
    u: &Field,
    cfg: &SchemeConfig,
    nl: &N,
) -> Result<Field> {
    single_step(SchemeKind::Ss2Adjoint, u, cfg, nl)
}

/// `(result, state after the first half step)`.
pub fn step_ss2_with_intermediate<N: Nonlinearity + ?Sized>(
    u: &Field,
    cfg: &SchemeConfig,
    nl: &N,
) -> Result<(Field, Field)> {
    composed_with_intermediate(SchemeKind::Ss2, u, cfg, nl)
}

pub fn step_ss2_adjoint_with_intermediate<N: Nonlinearity + ?Sized>(
    u: &Field,
    cfg: &SchemeConfig,
    nl: &N,
) -> Result<(Field, Field)> {
    composed_with_intermediate(SchemeKind::Ss2Adjoint, u, cfg, nl)
}

fn composed_with_intermediate<N: Nonlinearity + ?Sized>(
    scheme: SchemeKind,
    u: &Field,
    cfg: &SchemeConfig,
    nl: &N,
) -> Result<(Field, Field)> {
    let cfg = prepare(scheme, u, cfg, nl)?;
    let mut out = u.clone();
    let (_, mid) = Stepper::new(u.grid(), cfg, nl)?.step_with_intermediate(&mut out)?;
    Ok((out, mid.expect("composed schemes report the half step")))
}
