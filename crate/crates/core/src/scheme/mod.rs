//! The Saul'yev-type time steppers, their step-size limits, and the
//! time-march driver.
//!
//! With `r = ε²/h²` and `d` the dimension, one step of the forward sweep
//! (`ess1`) visits the nodes in increasing lexicographic order and sets
//!
//! ```text
//! u_k ← [(1 + τ(κ - d·r)) u_k + τ f(u_k) + τ r Σ neighbours] / (1 + τ(κ + d·r))
//! ```
//!
//! reading neighbours from the buffer being updated: those already visited
//! are at the new level, the rest at the old one, which reproduces the
//! periodic wrap of the triangular split exactly. The adjoint sweep
//! (`ess1-adjoint`) walks the nodes in decreasing order and solves
//! `(-1 + τ(κ - d·r)) ξ + τ f(ξ) + η = 0` at each node. `ss2` and
//! `ss2-adjoint` compose two half steps.

mod simulate;
mod stepper;
mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use simulate::{
    simulate, Simulation, SimulationOptions, SnapshotCollector, SnapshotSink, Trajectory,
};
pub use stepper::{
    step_ess1, step_ess1_adjoint, step_ss2, step_ss2_adjoint, step_ss2_adjoint_with_intermediate,
    step_ss2_with_intermediate, StepStats, Stepper,
};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::Nonlinearity;
use crate::scalar::NewtonConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    #[serde(rename = "ess1")]
    Ess1,
    #[serde(rename = "ess1-adjoint")]
    Ess1Adjoint,
    #[serde(rename = "ss2")]
    Ss2,
    #[serde(rename = "ss2-adjoint")]
    Ss2Adjoint,
    #[serde(rename = "ssi1")]
    Ssi1,
}

impl SchemeKind {
    pub const SWEEPS: [SchemeKind; 4] = [
        SchemeKind::Ess1,
        SchemeKind::Ess1Adjoint,
        SchemeKind::Ss2,
        SchemeKind::Ss2Adjoint,
    ];

    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::Ess1,
        SchemeKind::Ess1Adjoint,
        SchemeKind::Ss2,
        SchemeKind::Ss2Adjoint,
        SchemeKind::Ssi1,
    ];

    pub fn token(&self) -> &'static str {
        match self {
            SchemeKind::Ess1 => "ess1",
            SchemeKind::Ess1Adjoint => "ess1-adjoint",
            SchemeKind::Ss2 => "ss2",
            SchemeKind::Ss2Adjoint => "ss2-adjoint",
            SchemeKind::Ssi1 => "ssi1",
        }
    }

    /// Nominal temporal order of accuracy.
    pub fn order(&self) -> f64 {
        match self {
            SchemeKind::Ss2 | SchemeKind::Ss2Adjoint => 2.0,
            _ => 1.0,
        }
    }

    /// Whether a step solves per-point nonlinear equations.
    pub fn is_implicit(&self) -> bool {
        !matches!(self, SchemeKind::Ess1 | SchemeKind::Ssi1)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.token() == s.trim())
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown scheme `{s}` (expected ess1, ess1-adjoint, ss2, ss2-adjoint or ssi1)"
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NonlinearSolver {
    Newton,
    /// Closed-form cubic root; polynomial potential only.
    Cardano,
}

impl FromStr for NonlinearSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "newton" => Ok(NonlinearSolver::Newton),
            "cardano" => Ok(NonlinearSolver::Cardano),
            other => Err(Error::InvalidInput(format!(
                "unknown nonlinear solver `{other}` (expected newton or cardano)"
            ))),
        }
    }
}

impl fmt::Display for NonlinearSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NonlinearSolver::Newton => "newton",
            NonlinearSolver::Cardano => "cardano",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: SchemeKind,
    pub tau: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub newton: NewtonConfig,
    pub nonlinear_solver: NonlinearSolver,
    /// Reject time steps above [`max_stable_tau`] and initial data outside
    /// `[-β, β]`.
    pub enforce_thresholds: bool,
}

impl SchemeConfig {
    pub fn new(scheme: SchemeKind, tau: f64, epsilon: f64, kappa: f64) -> Self {
        Self {
            scheme,
            tau,
            epsilon,
            kappa,
            newton: NewtonConfig::default(),
            nonlinear_solver: NonlinearSolver::Newton,
            enforce_thresholds: true,
        }
    }

    pub fn with_solver(mut self, solver: NonlinearSolver) -> Self {
        self.nonlinear_solver = solver;
        self
    }

    pub fn with_newton(mut self, newton: NewtonConfig) -> Self {
        self.newton = newton;
        self
    }

    pub fn unchecked(mut self) -> Self {
        self.enforce_thresholds = false;
        self
    }

    pub fn with_scheme(mut self, scheme: SchemeKind) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    /// `ε² / h²`.
    pub fn diffusion_ratio(&self, grid: &Grid) -> f64 {
        let h = grid.spacing();
        self.epsilon * self.epsilon / (h * h)
    }

    /// Checks parameter ranges and, when enforced, the step-size limit.
    pub fn validate<N: Nonlinearity + ?Sized>(&self, grid: &Grid, nl: &N) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidInput(format!("ε = {} must be positive", self.epsilon)));
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::InvalidInput(format!("κ = {} must be non-negative", self.kappa)));
        }
        if !self.tau.is_finite() || self.tau == 0.0 {
            return Err(Error::InvalidInput(format!("τ = {} must be non-zero", self.tau)));
        }
        self.newton.validate()?;
        if self.nonlinear_solver == NonlinearSolver::Cardano && !nl.is_cubic() {
            return Err(Error::CardanoNeedsPolynomial);
        }
        if self.enforce_thresholds {
            if self.tau < 0.0 {
                return Err(Error::InvalidInput(
                    "negative time steps need enforce_thresholds = false".into(),
                ));
            }
            let limit = max_stable_tau(self.scheme, grid, self.epsilon, nl, self.kappa)?;
            if self.tau > limit {
                return Err(Error::StepTooLarge {
                    scheme: self.scheme.token(),
                    tau: self.tau,
                    limit,
                });
            }
        }
        Ok(())
    }
}

/// Largest time step for which the scheme provably keeps `‖u‖_∞ ≤ β` and
/// dissipates the discrete energy:
///
/// - `ess1`: `h² / (2ε²)`
/// - `ess1-adjoint`: `min{h² / (κh² + 2ε²), 1 / (κ + ‖f'‖)}`
/// - `ss2`, `ss2-adjoint`: twice the `ess1-adjoint` limit
/// - `ssi1`: unbounded
///
/// Fails when `κ < ‖f'‖` on `[-β, β]`.
pub fn max_stable_tau<N: Nonlinearity + ?Sized>(
    scheme: SchemeKind,
    grid: &Grid,
    epsilon: f64,
    nl: &N,
    kappa: f64,
) -> Result<f64> {
    let lip = nl.lipschitz();
    if kappa < lip * (1.0 - 1e-12) {
        return Err(Error::KappaTooSmall {
            kappa,
            required: lip,
        });
    }
    let h2 = grid.spacing() * grid.spacing();
    let e2 = epsilon * epsilon;
    let adjoint = (h2 / (kappa * h2 + 2.0 * e2)).min(1.0 / (kappa + lip));
    Ok(match scheme {
        SchemeKind::Ess1 => h2 / (2.0 * e2),
        SchemeKind::Ess1Adjoint => adjoint,
        SchemeKind::Ss2 | SchemeKind::Ss2Adjoint => 2.0 * adjoint,
        SchemeKind::Ssi1 => f64::INFINITY,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::potential::Potential;

    #[test]
    fn scheme_tokens() {
        for k in SchemeKind::ALL {
            assert_eq!(k.token().parse::<SchemeKind>().unwrap(), k);
        }
        assert!("ss3".parse::<SchemeKind>().is_err());
        assert_eq!(
            serde_json::to_string(&SchemeKind::Ess1Adjoint).unwrap(),
            "\"ess1-adjoint\""
        );
    }

    #[test]
    fn thresholds() {
        let p = Potential::poly();
        let g = Grid::two_d(512, 1.0).unwrap();
        let t = max_stable_tau(SchemeKind::Ess1, &g, 0.01, &p, 2.0).unwrap();
        let h = 1.0 / 512.0;
        assert!((t - h * h / (2.0 * 1e-4)).abs() < 1e-15);
        assert!((t - 0.019073486328125).abs() < 1e-12);

        // h = π/256 on [0, 2π)
        let g = Grid::two_d(512, 2.0 * PI).unwrap();
        let h = PI / 256.0;
        let t = max_stable_tau(SchemeKind::Ess1Adjoint, &g, 0.05, &p, 2.0).unwrap();
        let expected = (h * h / (2.0 * h * h + 2.0 * 0.0025)).min(0.25);
        assert!((t - expected).abs() < 1e-15);
        let t2 = max_stable_tau(SchemeKind::Ss2, &g, 0.05, &p, 2.0).unwrap();
        assert_eq!(t2, 2.0 * t);
        assert_eq!(
            max_stable_tau(SchemeKind::Ss2Adjoint, &g, 0.05, &p, 2.0).unwrap(),
            t2
        );
        assert_eq!(
            max_stable_tau(SchemeKind::Ssi1, &g, 0.05, &p, 2.0).unwrap(),
            f64::INFINITY
        );
        assert!(matches!(
            max_stable_tau(SchemeKind::Ess1, &g, 0.05, &p, 1.5),
            Err(Error::KappaTooSmall { .. })
        ));
    }

    #[test]
    fn validate_rejects_bad_configs() {
        let p = Potential::poly();
        let g = Grid::two_d(64, 1.0).unwrap();
        let base = SchemeConfig::new(SchemeKind::Ess1, 1e-3, 0.01, 2.0);
        assert!(base.validate(&g, &p).is_ok());
        assert!(matches!(
            base.with_tau(10.0).validate(&g, &p),
            Err(Error::StepTooLarge { .. })
        ));
        assert!(base.with_tau(10.0).unchecked().validate(&g, &p).is_ok());
        assert!(base.with_tau(-1e-3).validate(&g, &p).is_err());
        assert!(base.with_tau(-1e-3).unchecked().validate(&g, &p).is_ok());
        assert!(matches!(
            base.with_solver(NonlinearSolver::Cardano)
                .validate(&g, &Potential::log_default()),
            Err(Error::CardanoNeedsPolynomial)
        ));
    }
}
