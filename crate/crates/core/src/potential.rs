//! Bulk potentials `F`, their reaction terms `f = -F'`, the maximum bound β
//! with `f(β) = 0`, and the default stabilization `κ = max |f'|` on `[-β, β]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reaction term consumed by the sweeps. Implemented by [`Potential`]; tests
/// supply other implementations (for example `f ≡ 0`).
pub trait Nonlinearity: Sync {
    /// `f(ξ)`.
    fn reaction(&self, xi: f64) -> Result<f64>;
    /// `f'(ξ)`.
    fn reaction_derivative(&self, xi: f64) -> Result<f64>;
    /// The maximum bound β.
    fn bound(&self) -> f64;
    /// `max |f'|` on `[-β, β]`.
    fn lipschitz(&self) -> f64;
    /// True when `f(ξ) = ξ - ξ³`, so the per-point equation is a cubic.
    fn is_cubic(&self) -> bool {
        false
    }
    /// Largest `|ξ|` at which `f` may be evaluated.
    fn domain_limit(&self) -> f64 {
        f64::INFINITY
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialKind {
    /// Ginzburg–Landau double well `(ξ² - 1)² / 4`.
    Poly,
    /// Flory–Huggins logarithmic potential with temperature `theta` and
    /// critical temperature `theta_c`.
    Log { theta: f64, theta_c: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    kind: PotentialKind,
    beta: f64,
    kappa_default: f64,
}

pub const DEFAULT_THETA: f64 = 0.8;
pub const DEFAULT_THETA_C: f64 = 1.6;

impl Potential {
    pub fn poly() -> Self {
        Self {
            kind: PotentialKind::Poly,
            beta: 1.0,
            kappa_default: 2.0,
        }
    }

    pub fn log(theta: f64, theta_c: f64) -> Result<Self> {
        if !(theta.is_finite() && theta_c.is_finite() && 0.0 < theta && theta < theta_c) {
            return Err(Error::InvalidPotential(format!(
                "need 0 < θ < θ_c, got θ = {theta}, θ_c = {theta_c}"
            )));
        }
        let kind = PotentialKind::Log { theta, theta_c };
        let beta = log_root(theta, theta_c);
        let kappa_default = log_kappa(theta, theta_c, beta);
        Ok(Self {
            kind,
            beta,
            kappa_default,
        })
    }

    pub fn log_default() -> Self {
        Self::log(DEFAULT_THETA, DEFAULT_THETA_C).expect("default parameters are valid")
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    /// β: 1 for the double well, the positive root of `f` for the log form.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `max |f'|` on `[-β, β]`.
    pub fn kappa(&self) -> f64 {
        self.kappa_default
    }

    fn check_domain(&self, xi: f64) -> Result<()> {
        match self.kind {
            PotentialKind::Log { .. } if !(xi.abs() < 1.0) => Err(Error::Domain { value: xi }),
            _ => Ok(()),
        }
    }

    /// `f(ξ) = -F'(ξ)`.
    pub fn reaction(&self, xi: f64) -> Result<f64> {
        self.check_domain(xi)?;
        Ok(match self.kind {
            PotentialKind::Poly => xi - xi * xi * xi,
            PotentialKind::Log { theta, theta_c } => log_reaction(theta, theta_c, xi),
        })
    }

    /// The bulk energy density `F(ξ)`.
    pub fn bulk_energy(&self, xi: f64) -> Result<f64> {
        self.check_domain(xi)?;
        Ok(match self.kind {
            PotentialKind::Poly => {
                let s = xi * xi - 1.0;
                0.25 * s * s
            }
            PotentialKind::Log { theta, theta_c } => {
                0.5 * theta * ((1.0 + xi) * (1.0 + xi).ln() + (1.0 - xi) * (1.0 - xi).ln())
                    - 0.5 * theta_c * xi * xi
            }
        })
    }

    pub fn reaction_derivative(&self, xi: f64) -> Result<f64> {
        self.check_domain(xi)?;
        Ok(match self.kind {
            PotentialKind::Poly => 1.0 - 3.0 * xi * xi,
            PotentialKind::Log { theta, theta_c } => theta_c - theta / (1.0 - xi * xi),
        })
    }
}

impl Nonlinearity for Potential {
    #[inline]
    fn reaction(&self, xi: f64) -> Result<f64> {
        Potential::reaction(self, xi)
    }

    #[inline]
    fn reaction_derivative(&self, xi: f64) -> Result<f64> {
        Potential::reaction_derivative(self, xi)
    }

    fn bound(&self) -> f64 {
        self.beta
    }

    fn lipschitz(&self) -> f64 {
        self.kappa_default
    }

    fn is_cubic(&self) -> bool {
        matches!(self.kind, PotentialKind::Poly)
    }

    fn domain_limit(&self) -> f64 {
        match self.kind {
            PotentialKind::Poly => f64::INFINITY,
            PotentialKind::Log { .. } => 1.0 - f64::EPSILON,
        }
    }
}

#[inline]
fn log_reaction(theta: f64, theta_c: f64, xi: f64) -> f64 {
    0.5 * theta * ((1.0 - xi) / (1.0 + xi)).ln() + theta_c * xi
}

/// Positive root of the logarithmic reaction term: bisection on
/// `(sqrt(1 - θ/(2θ_c - θ)), 1)` down to 1e-14, then Newton polishing.
fn log_root(theta: f64, theta_c: f64) -> f64 {
    let f = |x: f64| log_reaction(theta, theta_c, x);
    let mut lo = (1.0 - theta / (2.0 * theta_c - theta)).sqrt();
    if f(lo) <= 0.0 {
        // f peaks where f' = 0 and is positive there
        lo = (1.0 - theta / theta_c).sqrt();
    }
    let mut hi = 1.0 - 1e-15;
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = theta_c - theta / (1.0 - x * x);
        let step = f(x) / d;
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    x
}

/// `|f'|` is monotone in `ξ²` on `[0, 1)`, so its extremes over `[-β, β]` sit
/// at the centre or at the endpoints.
fn log_kappa(theta: f64, theta_c: f64, beta: f64) -> f64 {
    let centre = (theta_c - theta).abs();
    let edge = (theta_c - theta / (1.0 - beta * beta)).abs();
    centre.max(edge)
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PotentialKind::Poly => write!(f, "poly"),
            PotentialKind::Log { theta, theta_c } => write!(f, "log:{theta},{theta_c}"),
        }
    }
}

impl FromStr for Potential {
    type Err = Error;

    /// `poly`, `log`, or `log:θ,θ_c`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "poly" => return Ok(Self::poly()),
            "log" => return Ok(Self::log_default()),
            _ => {}
        }
        let params = s
            .strip_prefix("log:")
            .ok_or_else(|| Error::InvalidPotential(format!("unknown potential `{s}`")))?;
        let parsed: Vec<f64> = params
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidPotential(format!("`{s}`: {e}")))?;
        match parsed.as_slice() {
            [theta, theta_c] => Self::log(*theta, *theta_c),
            _ => Err(Error::InvalidPotential(format!(
                "`{s}`: expected log:θ,θ_c"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn reaction_examples() {
        let p = Potential::poly();
        assert_eq!(p.reaction(1.0).unwrap(), 0.0);
        assert_eq!(p.reaction(0.0).unwrap(), 0.0);
        let l = Potential::log_default();
        assert!(l.reaction(0.9575).unwrap().abs() < 2e-4);
        assert!(matches!(l.reaction(1.0), Err(Error::Domain { .. })));
        assert!(matches!(l.reaction(-1.5), Err(Error::Domain { .. })));
        assert!(p.reaction(7.0).is_ok());
    }

    #[test]
    fn bulk_energy_examples() {
        let p = Potential::poly();
        assert_eq!(p.bulk_energy(0.0).unwrap(), 0.25);
        assert_eq!(p.bulk_energy(1.0).unwrap(), 0.0);
        assert_eq!(p.bulk_energy(-1.0).unwrap(), 0.0);
        assert_eq!(Potential::log_default().bulk_energy(0.0).unwrap(), 0.0);
        assert!(Potential::log_default().bulk_energy(1.0).is_err());
    }

    #[test]
    fn derivative_examples() {
        let p = Potential::poly();
        assert_eq!(p.reaction_derivative(0.0).unwrap(), 1.0);
        assert_eq!(p.reaction_derivative(1.0).unwrap(), -2.0);
        let l = Potential::log_default();
        assert!((l.reaction_derivative(0.0).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn beta_values() {
        assert_eq!(Potential::poly().beta(), 1.0);
        let l = Potential::log_default();
        assert!((l.beta() - 0.9575).abs() < 5e-5, "{}", l.beta());
        assert!(l.reaction(l.beta()).unwrap().abs() <= 1e-12);
        let lower = (1.0 - 0.8 / 2.4_f64).sqrt();
        assert!((lower - (2.0_f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(lower < l.beta() && l.beta() < 1.0);
    }

    #[test]
    fn kappa_values() {
        assert_eq!(Potential::poly().kappa(), 2.0);
        let l = Potential::log_default();
        assert!((l.kappa() - 8.02).abs() < 0.05, "{}", l.kappa());

        // brute-force maximum of |f'| on a dense sample of [-β, β]
        let beta = l.beta();
        let n = 1_000_000;
        let brute = (0..=n)
            .map(|i| -beta + 2.0 * beta * i as f64 / n as f64)
            .map(|x| l.reaction_derivative(x).unwrap().abs())
            .fold(0.0_f64, f64::max);
        assert!((brute - l.kappa()).abs() < 1e-9, "{brute} vs {}", l.kappa());
    }

    #[test]
    fn rejects_invalid_log_parameters() {
        assert!(Potential::log(1.6, 0.8).is_err());
        assert!(Potential::log(0.0, 1.0).is_err());
        assert!(Potential::log(-1.0, 1.0).is_err());
    }

    #[test]
    fn tokens_round_trip() {
        assert_eq!("poly".parse::<Potential>().unwrap(), Potential::poly());
        assert_eq!("log".parse::<Potential>().unwrap(), Potential::log_default());
        let p: Potential = "log:0.5,1.0".parse().unwrap();
        assert_eq!(p.to_string().parse::<Potential>().unwrap(), p);
        assert!("log:0.5".parse::<Potential>().is_err());
        assert!("quartic".parse::<Potential>().is_err());
    }

    fn potentials() -> impl Strategy<Value = Potential> {
        prop_oneof![
            Just(Potential::poly()),
            Just(Potential::log_default()),
            (0.1f64..0.9, 1.05f64..3.0).prop_map(|(t, ratio)| Potential::log(t, t * ratio).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn reaction_is_minus_energy_slope(p in potentials(), s in -0.999f64..0.999) {
            let xi = s * p.beta();
            let d = 1e-5;
            let fd = (p.bulk_energy(xi + d).unwrap() - p.bulk_energy(xi - d).unwrap()) / (2.0 * d);
            prop_assert!((p.reaction(xi).unwrap() + fd).abs() < 1e-6);
            let fd2 = (p.reaction(xi + d).unwrap() - p.reaction(xi - d).unwrap()) / (2.0 * d);
            prop_assert!((p.reaction_derivative(xi).unwrap() - fd2).abs() < 1e-5);
        }

        #[test]
        fn symmetry_and_sign_condition(p in potentials(), s in -1.0f64..1.0) {
            let xi = s * p.beta();
            prop_assert!((p.reaction(-xi).unwrap() + p.reaction(xi).unwrap()).abs() <= 1e-13);
            prop_assert!((p.bulk_energy(-xi).unwrap() - p.bulk_energy(xi).unwrap()).abs() <= 1e-13);
            let b = p.beta();
            prop_assert!(p.reaction(b).unwrap() <= 1e-12);
            prop_assert!(p.reaction(-b).unwrap() >= -1e-12);
            prop_assert!(p.reaction(b).unwrap().abs() <= 1e-12);
        }
    }
}
