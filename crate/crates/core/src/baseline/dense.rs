//! Dense-matrix formulation of the sweeps.
//!
//! The triangular halves of the periodic Laplacian are materialized as
//! explicit matrices (Kronecker sums in 2D) and the step is obtained by
//! forward substitution (`ess1`) or by per-row bisection in decreasing row
//! order (`ess1-adjoint`). Nothing here shares code with the sweep kernels.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::potential::Nonlinearity;
use crate::scheme::SchemeConfig;

/// Largest system the oracle will assemble.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OraclePart {
    Ess1,
    Ess1Adjoint,
}

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n + c]
    }

    #[inline]
    fn add(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.n + c] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.get(r, c) * x[c]).sum())
            .collect()
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.n).all(|r| (r + 1..self.n).all(|c| self.get(r, c) == 0.0))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|r| (0..r).all(|c| self.get(r, c) == 0.0))
    }
}

/// The 1D split matrices (unscaled):
///
/// ```text
/// upper: -1 on the diagonal, +1 above it, +1 at (0, M-1)
/// lower: -1 on the diagonal, +1 below it, +1 at (M-1, 0)
/// ```
fn split_1d(m: usize) -> (DenseMatrix, DenseMatrix) {
    let mut upper = DenseMatrix::zeros(m);
    let mut lower = DenseMatrix::zeros(m);
    for i in 0..m {
        upper.add(i, i, -1.0);
        lower.add(i, i, -1.0);
        if i + 1 < m {
            upper.add(i, i + 1, 1.0);
            lower.add(i + 1, i, 1.0);
        }
    }
    upper.add(0, m - 1, 1.0);
    lower.add(m - 1, 0, 1.0);
    (upper, lower)
}

/// `D ⊗ I + I ⊗ D` for row-major `(i, j) ↦ i·M + j`.
fn kronecker_sum(d: &DenseMatrix) -> DenseMatrix {
    let m = d.n;
    let mut out = DenseMatrix::zeros(m * m);
    for i in 0..m {
        for j in 0..m {
            let row = i * m + j;
            for k in 0..m {
                out.add(row, k * m + j, d.get(i, k));
                out.add(row, i * m + k, d.get(j, k));
            }
        }
    }
    out
}

/// Dense `(Δ_a, Δ_b)` on `grid`, scaled by `1/h²`.
pub fn dense_split_matrices(grid: &Grid) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = grid.len();
    if n > DENSE_LIMIT {
        return Err(Error::DenseTooLarge {
            size: n,
            limit: DENSE_LIMIT,
        });
    }
    let (mut a, mut b) = split_1d(grid.points());
    if grid.dim() == 2 {
        a = kronecker_sum(&a);
        b = kronecker_sum(&b);
    }
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    for v in a.data.iter_mut().chain(b.data.iter_mut()) {
        *v *= inv_h2;
    }
    Ok((a, b))
}

/// Increasing function `g` with a root; bisection on `[-bound, bound]`,
/// widening the bracket when the bound is infinite.
fn bisect(g: impl Fn(f64) -> Result<f64>, bound: f64) -> Result<f64> {
    let (mut lo, mut hi) = if bound.is_finite() {
        (-bound, bound)
    } else {
        let mut w = 1.0;
        while g(-w)? > 0.0 || g(w)? < 0.0 {
            w *= 2.0;
            if w > 1e12 {
                return Err(Error::NoBracket { lo: -w, hi: w });
            }
        }
        (-w, w)
    };
    let (glo, ghi) = (g(lo)?, g(hi)?);
    if glo > 0.0 || ghi < 0.0 {
        return Err(Error::NoBracket { lo, hi });
    }
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = g(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Solves one step of `ess1` or `ess1-adjoint` through the dense matrices.
///
/// - `ess1`: `(1/τ + κ - ε²Δ_b) u⁺ = (1/τ + κ) u + ε²Δ_a u + f(u)`, lower
///   triangular, forward substitution.
/// - `ess1-adjoint`: `(1/τ - κ - ε²Δ_a) u⁺ - f(u⁺) = (1/τ - κ) u + ε²Δ_b u`,
///   upper triangular, one scalar bisection per row from the last row up.
pub fn dense_triangular_oracle<N: Nonlinearity + ?Sized>(
    u: &Field,
    cfg: &SchemeConfig,
    nl: &N,
    part: OraclePart,
) -> Result<Field> {
    let grid = *u.grid();
    let (da, db) = dense_split_matrices(&grid)?;
    let n = grid.len();
    let x = u.as_slice();
    let e2 = cfg.epsilon * cfg.epsilon;
    let inv_tau = 1.0 / cfg.tau;
    let mut out = vec![0.0; n];
    match part {
        OraclePart::Ess1 => {
            if !db.is_lower_triangular() {
                return Err(Error::NotTriangular);
            }
            let au = da.mul_vec(x);
            for k in 0..n {
                let mut rhs = (inv_tau + cfg.kappa) * x[k] + e2 * au[k] + nl.reaction(x[k])?;
                for c in 0..k {
                    rhs += e2 * db.get(k, c) * out[c];
                }
                out[k] = rhs / (inv_tau + cfg.kappa - e2 * db.get(k, k));
            }
        }
        OraclePart::Ess1Adjoint => {
            if !da.is_upper_triangular() {
                return Err(Error::NotTriangular);
            }
            let bu = db.mul_vec(x);
            for k in (0..n).rev() {
                let mut rhs = (inv_tau - cfg.kappa) * x[k] + e2 * bu[k];
                for c in k + 1..n {
                    rhs += e2 * da.get(k, c) * out[c];
                }
                let diag = inv_tau - cfg.kappa - e2 * da.get(k, k);
                out[k] = bisect(|xi| Ok(diag * xi - nl.reaction(xi)? - rhs), nl.bound())?;
            }
        }
    }
    Field::new(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{laplacian, laplacian_split, SplitPart};
    use crate::potential::Potential;
    use crate::scheme::SchemeKind;

    #[test]
    fn matrices_match_operators_and_shapes() {
        for (dim, m) in [(1, 5), (2, 5), (2, 4)] {
            let g = Grid::new(dim, m, 1.0).unwrap();
            let (a, b) = dense_split_matrices(&g).unwrap();
            assert!(a.is_upper_triangular());
            assert!(b.is_lower_triangular());
            let v = Field::from_fn(g, |x| (7.0 * x[0]).sin() + (3.0 * x[1]).cos());
            let av = a.mul_vec(v.as_slice());
            let bv = b.mul_vec(v.as_slice());
            let la = laplacian_split(&v, SplitPart::A);
            let lb = laplacian_split(&v, SplitPart::B);
            let l = laplacian(&v);
            for k in 0..g.len() {
                assert!((av[k] - la.as_slice()[k]).abs() < 1e-10);
                assert!((bv[k] - lb.as_slice()[k]).abs() < 1e-10);
                assert!((av[k] + bv[k] - l.as_slice()[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn size_limit() {
        let g = Grid::two_d(65, 1.0).unwrap();
        assert!(matches!(
            dense_split_matrices(&g),
            Err(Error::DenseTooLarge { .. })
        ));
    }

    #[test]
    fn consistent_as_tau_shrinks() {
        let g = Grid::two_d(6, 1.0).unwrap();
        let p = Potential::poly();
        let u = Field::from_fn(g, |x| 0.5 * (6.0 * x[0]).sin() * (6.0 * x[1]).cos());
        for part in [OraclePart::Ess1, OraclePart::Ess1Adjoint] {
            let mut prev = f64::INFINITY;
            for tau in [1e-3, 1e-4, 1e-5] {
                let cfg = SchemeConfig::new(SchemeKind::Ess1, tau, 0.05, 2.0);
                let out = dense_triangular_oracle(&u, &cfg, &p, part).unwrap();
                let d = out.max_abs_diff(&u).unwrap();
                assert!(d < prev);
                assert!(d < 10.0 * tau, "{d} at τ = {tau}");
                prev = d;
            }
        }
    }
}
