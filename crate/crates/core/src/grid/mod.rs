//! Uniform periodic grids, grid functions, and the discrete calculus used by
//! every scheme: inner product, norms, forward gradient, the central
//! difference Laplacian, and its upper/lower triangular split.
//!
//! Fields are stored row-major: in 2D the node `(i, j)` lives at `i * M + j`,
//! with `i` running along the first axis. Increasing lexicographic order is
//! therefore a single forward pass over the storage.

mod snapshot;

pub use snapshot::{read_snapshot, write_snapshot, SnapshotMeta};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic index wrap, `i mod m` with a non-negative result.
#[inline]
pub fn wrap(i: isize, m: usize) -> usize {
    debug_assert!(m >= 1);
    i.rem_euclid(m as isize) as usize
}

/// Uniform periodic lattice on `[0, L)^dim` with `M` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points: usize,
    length: f64,
    spacing: f64,
}

impl Grid {
    /// Square grid with the same resolution and length along every axis.
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{1, 2}}")));
        }
        // the periodic stencil needs two distinct points per axis
        if points < 2 {
            return Err(Error::InvalidGrid(format!(
                "{points} points per axis, need at least 2"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("domain length {length}")));
        }
        Ok(Self {
            dim,
            points,
            length,
            spacing: length / points as f64,
        })
    }

    pub fn one_d(points: usize, length: f64) -> Result<Self> {
        Self::new(1, points, length)
    }

    pub fn two_d(points: usize, length: f64) -> Result<Self> {
        Self::new(2, points, length)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis, `M`.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// `h = L / M`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total number of nodes, `M^dim`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `h^dim`, the weight of one node in the discrete inner product.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Storage stride of each axis.
    pub fn strides(&self) -> [usize; 2] {
        match self.dim {
            1 => [1, 0],
            _ => [self.points, 1],
        }
    }

    /// Per-axis indices of a flat node index.
    pub fn multi_index(&self, k: usize) -> [usize; 2] {
        match self.dim {
            1 => [k, 0],
            _ => [k / self.points, k % self.points],
        }
    }

    /// Physical coordinates of node `k` (unused axes are zero).
    pub fn coords(&self, k: usize) -> [f64; 2] {
        let [i, j] = self.multi_index(k);
        [i as f64 * self.spacing, j as f64 * self.spacing]
    }

    pub(crate) fn same_as(&self, other: &Grid) -> bool {
        self.dim == other.dim && self.points == other.points && self.length == other.length
    }
}

/// Real samples of a grid function, one per node.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    data: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::FieldLength {
                expected: grid.len(),
                actual: data.len(),
            });
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            data: vec![value; grid.len()],
        }
    }

    /// Samples `func` at every node; the argument holds the node coordinates
    /// (the second entry is zero on 1D grids).
    pub fn from_fn(grid: Grid, func: impl Fn([f64; 2]) -> f64) -> Self {
        let data = (0..grid.len()).map(|k| func(grid.coords(k))).collect();
        Self { grid, data }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Pointwise `self - other`.
    pub fn difference(&self, other: &Field) -> Result<Field> {
        self.check_same_grid(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Field {
            grid: self.grid,
            data,
        })
    }

    pub fn map(&self, func: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            data: self.data.iter().map(|&v| func(v)).collect(),
        }
    }

    /// Largest pointwise `|self - other|`.
    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Periodic shift by `offset[axis]` nodes along each axis.
    pub fn rotated(&self, offset: [usize; 2]) -> Field {
        let m = self.grid.points;
        let data = (0..self.len())
            .map(|k| {
                let [i, j] = self.grid.multi_index(k);
                let src = match self.grid.dim {
                    1 => (i + offset[0]) % m,
                    _ => ((i + offset[0]) % m) * m + (j + offset[1]) % m,
                };
                self.data[src]
            })
            .collect();
        Field {
            grid: self.grid,
            data,
        }
    }

    /// Samples this field at the nodes of a coarser grid that nests in it.
    pub fn restrict_to(&self, coarse: &Grid) -> Result<Field> {
        let fine = self.grid;
        if coarse.dim != fine.dim || coarse.length != fine.length {
            return Err(Error::GridMismatch);
        }
        if coarse.points > fine.points || !fine.points.is_multiple_of(coarse.points) {
            return Err(Error::NonNesting {
                coarse: coarse.points,
                fine: fine.points,
            });
        }
        let stride = fine.points / coarse.points;
        let data = (0..coarse.len())
            .map(|k| {
                let [i, j] = coarse.multi_index(k);
                match fine.dim {
                    1 => self.data[i * stride],
                    _ => self.data[(i * stride) * fine.points + j * stride],
                }
            })
            .collect();
        Ok(Field {
            grid: *coarse,
            data,
        })
    }
}

/// Forward differences of a field, one component per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    grid: Grid,
    components: Vec<Vec<f64>>,
}

impl GradientField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        &self.components[axis]
    }

    /// Squared discrete norm summed over the components.
    pub fn norm_squared(&self) -> f64 {
        let w = self.grid.cell_volume();
        self.components
            .iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
            * w
    }

    pub fn inner_product(&self, other: &GradientField) -> Result<f64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let w = self.grid.cell_volume();
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>())
            .sum::<f64>()
            * w)
    }
}

/// Discrete L² inner product `h^dim Σ v w`.
pub fn inner_product(v: &Field, w: &Field) -> Result<f64> {
    v.check_same_grid(w)?;
    let sum: f64 = v.data.iter().zip(&w.data).map(|(a, b)| a * b).sum();
    Ok(sum * v.grid.cell_volume())
}

pub fn l2_norm(v: &Field) -> f64 {
    let sum: f64 = v.data.iter().map(|a| a * a).sum();
    (sum * v.grid.cell_volume()).sqrt()
}

pub fn sup_norm(v: &Field) -> f64 {
    v.data.iter().fold(0.0_f64, |m, a| m.max(a.abs()))
}

/// Periodic neighbour offsets along one axis of node `k`, as flat indices.
#[inline]
fn axis_neighbours(grid: &Grid, k: usize, axis: usize) -> (usize, usize) {
    let m = grid.points;
    let stride = grid.strides()[axis];
    let c = grid.multi_index(k)[axis];
    let prev = if c == 0 { k + (m - 1) * stride } else { k - stride };
    let next = if c == m - 1 { k - (m - 1) * stride } else { k + stride };
    (prev, next)
}

pub fn forward_gradient(v: &Field) -> GradientField {
    let grid = v.grid;
    let inv_h = 1.0 / grid.spacing;
    let components = (0..grid.dim)
        .map(|axis| {
            (0..grid.len())
                .map(|k| {
                    let (_, next) = axis_neighbours(&grid, k, axis);
                    (v.data[next] - v.data[k]) * inv_h
                })
                .collect()
        })
        .collect();
    GradientField { grid, components }
}

/// Periodic central-difference Laplacian (3-point in 1D, 5-point in 2D).
pub fn laplacian(v: &Field) -> Field {
    let grid = v.grid;
    let inv_h2 = 1.0 / (grid.spacing * grid.spacing);
    let data = (0..grid.len())
        .map(|k| {
            let mut acc = 0.0;
            for axis in 0..grid.dim {
                let (prev, next) = axis_neighbours(&grid, k, axis);
                acc += v.data[prev] - 2.0 * v.data[k] + v.data[next];
            }
            acc * inv_h2
        })
        .collect();
    Field { grid, data }
}

/// Which triangular half of the Laplacian split to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitPart {
    /// Upper part: `-v_i + v_{i+1}` per axis, plus the wrap entry `v_{M-1}`
    /// on the first row; the last row keeps only its diagonal.
    A,
    /// Lower part: `-v_i + v_{i-1}` per axis, plus the wrap entry `v_0` on
    /// the last row; the first row keeps only its diagonal.
    B,
}

/// Applies `Δ_a` or `Δ_b`; their sum is [`laplacian`].
pub fn laplacian_split(v: &Field, part: SplitPart) -> Field {
    let grid = v.grid;
    let m = grid.points;
    let inv_h2 = 1.0 / (grid.spacing * grid.spacing);
    let data = (0..grid.len())
        .map(|k| {
            let idx = grid.multi_index(k);
            let mut acc = 0.0;
            for axis in 0..grid.dim {
                let c = idx[axis];
                let (prev, next) = axis_neighbours(&grid, k, axis);
                acc -= v.data[k];
                match part {
                    SplitPart::A => {
                        if c < m - 1 {
                            acc += v.data[next];
                        }
                        if c == 0 {
                            acc += v.data[prev];
                        }
                    }
                    SplitPart::B => {
                        if c > 0 {
                            acc += v.data[prev];
                        }
                        if c == m - 1 {
                            acc += v.data[next];
                        }
                    }
                }
            }
            acc * inv_h2
        })
        .collect();
    Field { grid, data }
}
