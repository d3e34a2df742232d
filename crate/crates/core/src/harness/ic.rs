//! Initial conditions.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::read_snapshot;
use crate::grid::{Field, Grid};

/// Centres and radii `(x, y, r)` of the eight-circles benchmark.
pub const EIGHT_CIRCLES: [(f64, f64, f64); 8] = [
    (PI / 2.0, PI / 2.0, PI / 5.0),
    (PI / 4.0, 3.0 * PI / 4.0, PI / 10.0),
    (PI / 2.0, 5.0 * PI / 4.0, PI / 10.0),
    (PI, PI / 4.0, PI / 8.0),
    (49.0 * PI / 40.0, PI / 4.0, PI / 8.0),
    (PI, PI, PI / 4.0),
    (3.0 * PI / 2.0, 3.0 * PI / 2.0, PI / 4.0),
    (5.0, 3.0, 2.0 * PI / 15.0),
];

fn require_2d(grid: &Grid) -> Result<()> {
    if grid.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            actual: grid.dim(),
        });
    }
    Ok(())
}

/// `0.1 sin(2πx) sin(2πy)`.
pub fn ic_sinesine(grid: &Grid) -> Result<Field> {
    require_2d(grid)?;
    Ok(Field::from_fn(*grid, |x| {
        0.1 * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin()
    }))
}

fn bump(xi: f64, epsilon: f64) -> f64 {
    if xi < 0.0 {
        2.0 * (-epsilon * epsilon / (xi * xi)).exp()
    } else {
        0.0
    }
}

/// `-0.2 + 0.2 Σ g(|x - c_i| - r_i)` with `g(ξ) = 2 exp(-ε²/ξ²)` for `ξ < 0`.
/// Distances are Euclidean in the square, without periodic images.
pub fn ic_eight_circles(grid: &Grid, epsilon: f64) -> Result<Field> {
    require_2d(grid)?;
    if (grid.length() - 2.0 * PI).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "the eight-circles data lives on (0, 2π)², got L = {}",
            grid.length()
        )));
    }
    Ok(Field::from_fn(*grid, |x| {
        let sum: f64 = EIGHT_CIRCLES
            .iter()
            .map(|&(cx, cy, r)| bump((x[0] - cx).hypot(x[1] - cy) - r, epsilon))
            .sum();
        -0.2 + 0.2 * sum
    }))
}

/// Uniform samples in `[-amplitude, amplitude]` from a ChaCha8 stream.
pub fn ic_random(grid: &Grid, amplitude: f64, seed: u64) -> Result<Field> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::InvalidInput(format!("bad amplitude {amplitude}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..grid.len())
        .map(|_| amplitude * rng.gen_range(-1.0..=1.0))
        .collect();
    Field::new(*grid, data)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialCondition {
    SineSine,
    Circles,
    Random { seed: u64, amplitude: f64 },
    File { path: PathBuf },
}

impl InitialCondition {
    pub fn build(&self, grid: &Grid, epsilon: f64) -> Result<Field> {
        match self {
            InitialCondition::SineSine => ic_sinesine(grid),
            InitialCondition::Circles => ic_eight_circles(grid, epsilon),
            InitialCondition::Random { seed, amplitude } => ic_random(grid, *amplitude, *seed),
            InitialCondition::File { path } => {
                let (field, _) = read_snapshot(path)?;
                if field.grid() != grid {
                    return Err(Error::GridMismatch);
                }
                Ok(field)
            }
        }
    }
}

impl fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCondition::SineSine => f.write_str("sinesine"),
            InitialCondition::Circles => f.write_str("circles"),
            InitialCondition::Random { seed, amplitude } => {
                write!(f, "random:{seed},{amplitude}")
            }
            InitialCondition::File { path } => write!(f, "file:{}", path.display()),
        }
    }
}

impl FromStr for InitialCondition {
    type Err = Error;

    /// `sinesine`, `circles`, `random:SEED,AMP` or `file:PATH` (a snapshot
    /// stem, without extension).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown initial condition `{s}`"));
        match s {
            "sinesine" => return Ok(InitialCondition::SineSine),
            "circles" => return Ok(InitialCondition::Circles),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("random:") {
            let (seed, amp) = rest.split_once(',').ok_or_else(bad)?;
            return Ok(InitialCondition::Random {
                seed: seed.trim().parse().map_err(|_| bad())?,
                amplitude: amp.trim().parse().map_err(|_| bad())?,
            });
        }
        if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                return Err(bad());
            }
            return Ok(InitialCondition::File { path: path.into() });
        }
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sup_norm;

    #[test]
    fn sinesine_examples() {
        let g = Grid::two_d(8, 1.0).unwrap();
        let u = ic_sinesine(&g).unwrap();
        // node (2, 2) sits at (0.25, 0.25), node (4, j) at x = 0.5
        assert!((u.as_slice()[2 * 8 + 2] - 0.1).abs() < 1e-15);
        for j in 0..8 {
            assert!(u.as_slice()[4 * 8 + j].abs() < 1e-15);
        }
        assert!(sup_norm(&u) <= 0.1);
        assert!(ic_sinesine(&Grid::one_d(8, 1.0).unwrap()).is_err());
    }

    #[test]
    fn eight_circles_examples() {
        let eps = 0.05;
        let g = Grid::two_d(512, 2.0 * PI).unwrap();
        let u = ic_eight_circles(&g, eps).unwrap();
        assert!(sup_norm(&u) <= 1.0);
        // (0, 0) is far from every circle
        assert_eq!(u.as_slice()[0], -0.2);
        // circle 6 is centred at (π, π), node (256, 256)
        let centre = u.as_slice()[256 * 512 + 256];
        let expected = -0.2 + 0.4 * (-(eps * eps) / (PI / 4.0).powi(2)).exp();
        assert!((centre - expected).abs() < 1e-14);
        assert!((centre - 0.2).abs() < 0.01);
        assert!(ic_eight_circles(&Grid::two_d(16, 1.0).unwrap(), eps).is_err());
    }

    #[test]
    fn random_fields_are_reproducible() {
        let g = Grid::two_d(16, 1.0).unwrap();
        let a = ic_random(&g, 0.5, 1).unwrap();
        let b = ic_random(&g, 0.5, 2).unwrap();
        let c = ic_random(&g, 0.5, 3).unwrap();
        assert_ne!(a, b);
        assert_ne!(b, c);
        assert_eq!(a, ic_random(&g, 0.5, 1).unwrap());
        for u in [&a, &b, &c] {
            assert!(sup_norm(u) <= 0.5);
            let mean: f64 = u.as_slice().iter().sum::<f64>() / u.len() as f64;
            assert!(mean.abs() <= 0.5);
        }
    }

    #[test]
    fn tokens_round_trip() {
        for tok in ["sinesine", "circles", "random:7,0.5", "file:out/snap_000000"] {
            let ic: InitialCondition = tok.parse().unwrap();
            assert_eq!(ic.to_string(), tok);
        }
        for tok in ["random:7", "random:x,1", "file:", "blob"] {
            assert!(tok.parse::<InitialCondition>().is_err());
        }
    }
}
