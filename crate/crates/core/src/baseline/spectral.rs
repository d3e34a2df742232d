//! First-order stabilized semi-implicit scheme
//! `(u⁺ - u)/τ = ε²Δ_h u⁺ + f(u) - κ(u⁺ - u)`, diagonalized by the discrete
//! Fourier transform: O(M^d log M) per step.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::grid::{Field, Grid};
use crate::potential::Nonlinearity;
use crate::scheme::SchemeConfig;

/// Transform plans and Laplacian eigenvalues for one grid.
pub struct SpectralPlan {
    grid: Grid,
    eigenvalues: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Reusable buffers for [`SpectralPlan::step_in_place`].
pub struct SpectralWork {
    buf: Vec<Complex<f64>>,
    tmp: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl SpectralPlan {
    pub fn new(grid: &Grid) -> Self {
        let m = grid.points();
        let h = grid.spacing();
        let axis: Vec<f64> = (0..m)
            .map(|k| (2.0 * (2.0 * std::f64::consts::PI * k as f64 / m as f64).cos() - 2.0) / (h * h))
            .collect();
        let eigenvalues = match grid.dim() {
            1 => axis,
            _ => (0..m * m).map(|k| axis[k / m] + axis[k % m]).collect(),
        };
        let mut planner = FftPlanner::new();
        Self {
            grid: *grid,
            eigenvalues,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Eigenvalues of the periodic discrete Laplacian, in transform order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn work(&self) -> SpectralWork {
        let n = self.grid.len();
        let scratch = self
            .forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len());
        SpectralWork {
            buf: vec![Complex::default(); n],
            tmp: vec![Complex::default(); n],
            scratch: vec![Complex::default(); scratch],
        }
    }

    fn transpose(src: &[Complex<f64>], dst: &mut [Complex<f64>], m: usize) {
        for i in 0..m {
            for j in 0..m {
                dst[j * m + i] = src[i * m + j];
            }
        }
    }

    /// Forward transform of `work.buf`; the spectrum ends up in `work.buf`
    /// (1D) or `work.tmp` in transposed layout (2D). Returns which.
    fn forward_transform(&self, work: &mut SpectralWork) -> bool {
        let m = self.grid.points();
        self.forward.process_with_scratch(&mut work.buf, &mut work.scratch);
        if self.grid.dim() == 1 {
            return false;
        }
        Self::transpose(&work.buf, &mut work.tmp, m);
        self.forward.process_with_scratch(&mut work.tmp, &mut work.scratch);
        true
    }

    /// Inverse of [`Self::forward_transform`] (unnormalized), back into `work.buf`.
    fn inverse_transform(&self, work: &mut SpectralWork, transposed: bool) {
        let m = self.grid.points();
        if transposed {
            self.inverse.process_with_scratch(&mut work.tmp, &mut work.scratch);
            Self::transpose(&work.tmp, &mut work.buf, m);
        }
        self.inverse.process_with_scratch(&mut work.buf, &mut work.scratch);
    }

    /// Forward then inverse transform, normalized; used to check round-off.
    pub fn round_trip(&self, data: &[f64]) -> Vec<f64> {
        let mut work = self.work();
        for (c, &v) in work.buf.iter_mut().zip(data) {
            *c = Complex::new(v, 0.0);
        }
        let t = self.forward_transform(&mut work);
        self.inverse_transform(&mut work, t);
        let scale = 1.0 / self.grid.len() as f64;
        work.buf.iter().map(|c| c.re * scale).collect()
    }

    /// One SSI1 step applied to `u` in place.
    pub fn step_in_place<N: Nonlinearity + ?Sized>(
        &self,
        u: &mut [f64],
        cfg: &SchemeConfig,
        nl: &N,
        work: &mut SpectralWork,
    ) -> Result<()> {
        let shift = 1.0 / cfg.tau + cfg.kappa;
        for (c, &v) in work.buf.iter_mut().zip(u.iter()) {
            *c = Complex::new(shift * v + nl.reaction(v)?, 0.0);
        }
        let transposed = self.forward_transform(work);
        let e2 = cfg.epsilon * cfg.epsilon;
        let spectrum = if transposed { &mut work.tmp } else { &mut work.buf };
        // λ(i, j) = λ(j, i), so the transposed layout needs no reindexing
        for (c, &lam) in spectrum.iter_mut().zip(&self.eigenvalues) {
            *c /= shift - e2 * lam;
        }
        self.inverse_transform(work, transposed);
        let scale = 1.0 / self.grid.len() as f64;
        for (v, c) in u.iter_mut().zip(&work.buf) {
            *v = c.re * scale;
        }
        Ok(())
    }
}

/// One SSI1 step.
pub fn step_ssi1<N: Nonlinearity + ?Sized>(
    u: &Field,
    cfg: &SchemeConfig,
    nl: &N,
    plan: &SpectralPlan,
) -> Result<Field> {
    if u.grid() != plan.grid() {
        return Err(crate::Error::GridMismatch);
    }
    let mut out = u.clone();
    let mut work = plan.work();
    plan.step_in_place(out.as_mut_slice(), cfg, nl, &mut work)?;
    Ok(out)
}
