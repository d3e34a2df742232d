//! Scalar root finders for the per-point equations of the implicit sweep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialGuess {
    /// The value at the same node on the previous time level.
    PreviousValue,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub initial_guess: InitialGuess,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
            initial_guess: InitialGuess::PreviousValue,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidInput(format!(
                "Newton tolerance {} and iteration cap {} must be positive",
                self.tol, self.max_iter
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub final_residual: f64,
    /// Some iterate left `[-bound, bound]` and was pulled back.
    pub clamped: bool,
}

/// Newton iteration for `residual(ξ) = 0` starting from `xi0`.
///
/// Iterates that leave `[-bound, bound]` are clamped back onto the interval;
/// pass `f64::INFINITY` to disable clamping. Converged once
/// `|residual| <= cfg.tol` after at least one correction; an initial guess
/// that merely meets the tolerance would leave a bias that accumulates over
/// thousands of steps.
pub fn newton_scalar<R, D>(
    residual: R,
    derivative: D,
    xi0: f64,
    bound: f64,
    cfg: &NewtonConfig,
) -> Result<(f64, SolveStats)>
where
    R: Fn(f64) -> Result<f64>,
    D: Fn(f64) -> Result<f64>,
{
    let mut stats = SolveStats::default();
    let mut x = xi0.clamp(-bound, bound);
    let mut r = residual(x)?;
    while r.abs() > cfg.tol || (stats.iterations == 0 && r != 0.0) {
        if stats.iterations == cfg.max_iter {
            return Err(Error::SolverDiverged {
                iterations: stats.iterations,
                residual: r,
            });
        }
        let mut next = x - r / derivative(x)?;
        if !next.is_finite() {
            return Err(Error::SolverDiverged {
                iterations: stats.iterations,
                residual: r,
            });
        }
        if next.abs() > bound {
            next = next.clamp(-bound, bound);
            stats.clamped = true;
        }
        x = next;
        r = residual(x)?;
        stats.iterations += 1;
    }
    stats.final_residual = r.abs();
    Ok((x, stats))
}

/// Real cube root that is odd in its argument.
#[inline]
fn real_cbrt(x: f64) -> f64 {
    if x < 0.0 {
        -(-x).cbrt()
    } else {
        x.cbrt()
    }
}

/// The single real root of `ξ³ + pξ + q = 0` by Cardano's formula.
/// Requires a positive discriminant `q²/4 + p³/27`.
pub fn cardano_real_root(p: f64, q: f64) -> Result<f64> {
    let disc = 0.25 * q * q + p * p * p / 27.0;
    if !(disc > 0.0) {
        return Err(Error::Discriminant(disc));
    }
    let s = disc.sqrt();
    let half = -0.5 * q;
    // the two cube roots a, b satisfy ab = -p/3 and a³ + b³ = -q, so
    // a + b = -q / (a² + p/3 + b²), which has no cancellation
    let a = if half >= 0.0 {
        real_cbrt(half + s)
    } else {
        real_cbrt(half - s)
    };
    if a == 0.0 {
        return Ok(0.0);
    }
    let b = -p / (3.0 * a);
    Ok(-q / (a * a + p / 3.0 + b * b))
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn cfg() -> NewtonConfig {
        NewtonConfig::default()
    }

    #[test]
    fn newton_cubic_example() {
        let (x, s) = newton_scalar(
            |x| Ok(x * x * x + x - 2.0),
            |x| Ok(3.0 * x * x + 1.0),
            0.5,
            f64::INFINITY,
            &cfg(),
        )
        .unwrap();
        assert!((x - 1.0).abs() < 1e-12);
        assert!(s.final_residual <= 1e-12);
        assert!(s.iterations <= 8);
    }

    #[test]
    fn newton_linear_takes_one_iteration() {
        let (x, s) = newton_scalar(Ok, |_| Ok(1.0), 0.3, 1.0, &cfg()).unwrap();
        assert_eq!(x, 0.0);
        assert_eq!(s.iterations, 1);
    }

    #[test]
    fn newton_reports_divergence() {
        // no real root
        let err = newton_scalar(|x| Ok(x * x + 1.0), |x| Ok(2.0 * x), 0.5, 10.0, &cfg());
        assert!(matches!(err, Err(Error::SolverDiverged { .. })));
    }

    #[test]
    fn newton_clamps_into_the_interval() {
        // from -0.9 the first step lands near 1.33
        let (x, s) = newton_scalar(
            |x| Ok(x.atan() - 0.5),
            |x| Ok(1.0 / (1.0 + x * x)),
            -0.9,
            1.0,
            &cfg(),
        )
        .unwrap();
        assert!((x - 0.5_f64.tan()).abs() < 1e-12);
        assert!(s.clamped);

        // an out-of-interval initial guess is pulled in before iterating
        let (x, _) = newton_scalar(|x| Ok(x - 0.2), |_| Ok(1.0), 5.0, 1.0, &cfg()).unwrap();
        assert!((x - 0.2).abs() < 1e-15);
    }

    #[test]
    fn cardano_examples() {
        assert_eq!(cardano_real_root(1.0, 0.0).unwrap(), 0.0);
        assert!((cardano_real_root(1.0, -2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(
            cardano_real_root(-3.0, 0.0),
            Err(Error::Discriminant(_))
        ));
    }

    #[test]
    fn cardano_matches_newton_on_random_cubics() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let p: f64 = 10f64.powf(rng.gen_range(-3.0..4.0));
            let q: f64 = rng.gen_range(-1.0..1.0) * 10f64.powf(rng.gen_range(-3.0..4.0));
            let c = cardano_real_root(p, q).unwrap();
            assert!((c * c * c + p * c + q).abs() <= 1e-10 * q.abs().max(1.0).max(p * c.abs()));
            let ncfg = NewtonConfig {
                tol: 1e-12 * q.abs().max(1.0),
                ..cfg()
            };
            let (n, _) = newton_scalar(
                |x| Ok(x * x * x + p * x + q),
                |x| Ok(3.0 * x * x + p),
                0.0,
                f64::INFINITY,
                &ncfg,
            )
            .unwrap();
            assert!((n - c).abs() <= 1e-9 * c.abs().max(1.0), "p={p} q={q}: {n} vs {c}");
        }
    }
}
