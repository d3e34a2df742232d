//! Point-by-point sweep kernels over a single in-place buffer.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::Nonlinearity;
use crate::scalar::{cardano_real_root, newton_scalar, InitialGuess, NewtonConfig};

use super::NonlinearSolver;

/// Coefficients of one sweep with a fixed (possibly negative) time step.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SweepCoefficients {
    pub tau: f64,
    pub kappa: f64,
    /// `d·r`, the diagonal weight of the Laplacian split.
    pub diag: f64,
    /// `τ r`, weight of each neighbour.
    pub neighbour: f64,
}

impl SweepCoefficients {
    pub fn new(tau: f64, kappa: f64, ratio: f64, dim: usize) -> Self {
        Self {
            tau,
            kappa,
            diag: dim as f64 * ratio,
            neighbour: tau * ratio,
        }
    }
}

/// Visits every node in lexicographic order (reversed if `backward`) and
/// replaces `buf[k]` by `update(buf[k], neighbour_sum)`, where the sum reads
/// the current buffer contents.
#[inline(always)]
fn sweep<F>(buf: &mut [f64], grid: &Grid, backward: bool, mut update: F) -> Result<()>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let m = grid.points();
    match grid.dim() {
        1 => {
            let mut visit = |i: usize| -> Result<()> {
                let left = if i == 0 { m - 1 } else { i - 1 };
                let right = if i == m - 1 { 0 } else { i + 1 };
                let s = buf[left] + buf[right];
                buf[i] = update(buf[i], s)?;
                Ok(())
            };
            if backward {
                for i in (0..m).rev() {
                    visit(i)?;
                }
            } else {
                for i in 0..m {
                    visit(i)?;
                }
            }
        }
        _ => {
            let mut row = |i: usize, buf: &mut [f64]| -> Result<()> {
                let up = if i == 0 { m - 1 } else { i - 1 } * m;
                let down = if i == m - 1 { 0 } else { i + 1 } * m;
                let base = i * m;
                let mut visit = |j: usize| -> Result<()> {
                    let left = if j == 0 { m - 1 } else { j - 1 };
                    let right = if j == m - 1 { 0 } else { j + 1 };
                    let s = buf[up + j] + buf[down + j] + buf[base + left] + buf[base + right];
                    buf[base + j] = update(buf[base + j], s)?;
                    Ok(())
                };
                if backward {
                    for j in (0..m).rev() {
                        visit(j)?;
                    }
                } else {
                    for j in 0..m {
                        visit(j)?;
                    }
                }
                Ok(())
            };
            if backward {
                for i in (0..m).rev() {
                    row(i, buf)?;
                }
            } else {
                for i in 0..m {
                    row(i, buf)?;
                }
            }
        }
    }
    Ok(())
}

/// Forward sweep: explicit in the reaction term, one division per node.
pub(crate) fn forward_sweep<N: Nonlinearity + ?Sized>(
    buf: &mut [f64],
    grid: &Grid,
    c: &SweepCoefficients,
    nl: &N,
) -> Result<()> {
    let (tau, w) = (c.tau, c.neighbour);
    let a = 1.0 + tau * (c.kappa - c.diag);
    let inv = 1.0 / (1.0 + tau * (c.kappa + c.diag));
    sweep(buf, grid, false, |old, s| {
        Ok((a * old + tau * nl.reaction(old)? + w * s) * inv)
    })
}

/// Backward sweep: solves `(-1 + τ(κ - d·r)) ξ + τ f(ξ) + η = 0` per node
/// with `η = (1 - τ(κ + d·r)) u_old + τ r Σ neighbours`. Returns the largest
/// Newton iteration count and whether any iterate was clamped.
pub(crate) fn backward_sweep<N: Nonlinearity + ?Sized>(
    buf: &mut [f64],
    grid: &Grid,
    c: &SweepCoefficients,
    nl: &N,
    solver: NonlinearSolver,
    newton: &NewtonConfig,
    clamp: f64,
) -> Result<(usize, bool)> {
    let (tau, w) = (c.tau, c.neighbour);
    let a = -1.0 + tau * (c.kappa - c.diag);
    let b = 1.0 - tau * (c.kappa + c.diag);
    let mut max_iter = 0;
    let mut clamped = false;
    match solver {
        NonlinearSolver::Newton => {
            sweep(buf, grid, true, |old, s| {
                let eta = b * old + w * s;
                let x0 = match newton.initial_guess {
                    InitialGuess::PreviousValue => old,
                    InitialGuess::Zero => 0.0,
                };
                let (x, stats) = newton_scalar(
                    |x| Ok(a * x + tau * nl.reaction(x)? + eta),
                    |x| Ok(a + tau * nl.reaction_derivative(x)?),
                    x0,
                    clamp,
                    newton,
                )?;
                max_iter = max_iter.max(stats.iterations);
                clamped |= stats.clamped;
                Ok(x)
            })?;
        }
        NonlinearSolver::Cardano => {
            if !nl.is_cubic() {
                return Err(Error::CardanoNeedsPolynomial);
            }
            // a ξ + τ(ξ - ξ³) + η = 0  ⇔  ξ³ + pξ + q = 0
            let p = -(a + tau) / tau;
            let inv_tau = 1.0 / tau;
            sweep(buf, grid, true, |old, s| {
                let eta = b * old + w * s;
                cardano_real_root(p, -eta * inv_tau)
            })?;
        }
    }
    Ok((max_iter, clamped))
}
