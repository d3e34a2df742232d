#![allow(dead_code)]

use saulyev::error::Result;
use saulyev::grid::{Field, Grid};
use saulyev::harness::ic_random;
use saulyev::potential::{Nonlinearity, Potential};
use saulyev::scheme::{max_stable_tau, SchemeConfig, SchemeKind};

/// `f ≡ 0` with `β = ∞`.
pub struct NoReaction;

impl Nonlinearity for NoReaction {
    fn reaction(&self, _xi: f64) -> Result<f64> {
        Ok(0.0)
    }
    fn reaction_derivative(&self, _xi: f64) -> Result<f64> {
        Ok(0.0)
    }
    fn bound(&self) -> f64 {
        f64::INFINITY
    }
    fn lipschitz(&self) -> f64 {
        0.0
    }
}

pub fn potentials() -> [Potential; 2] {
    [Potential::poly(), Potential::log_default()]
}

/// Half of the most restrictive sweep limit on `grid`.
pub fn safe_tau(grid: &Grid, epsilon: f64, p: &Potential) -> f64 {
    SchemeKind::SWEEPS
        .iter()
        .map(|&s| max_stable_tau(s, grid, epsilon, p, p.kappa()).unwrap())
        .fold(f64::INFINITY, f64::min)
        * 0.5
}

pub fn config(scheme: SchemeKind, tau: f64, epsilon: f64, p: &Potential) -> SchemeConfig {
    SchemeConfig::new(scheme, tau, epsilon, p.kappa())
}

pub fn random(grid: &Grid, p: &Potential, seed: u64) -> Field {
    ic_random(grid, 0.9 * p.beta(), seed).unwrap()
}
