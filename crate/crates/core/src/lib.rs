//! Periodic Saul'yev-type time steppers for the Allen–Cahn equation
//! `u_t = ε²Δu + f(u)` on uniform periodic grids in one and two dimensions.
//!
//! The four sweep schemes (`ess1`, `ess1-adjoint`, `ss2`, `ss2-adjoint`) are
//! solved point by point in O(M^d) work per step and preserve both the
//! discrete maximum bound and the discrete energy dissipation law under the
//! step-size limits returned by [`scheme::max_stable_tau`]. A stabilized
//! semi-implicit spectral scheme (`ssi1`) is included as a reference and
//! benchmark opponent.
//!
//! Module map:
//! - [`grid`]: grids, fields, discrete calculus, snapshot files.
//! - [`potential`]: bulk potentials, the bound β and stabilization κ.
//! - [`scalar`]: per-point Newton iteration and the Cardano closed form.
//! - [`scheme`]: the sweeps, step-size limits, and the time-march driver.
//! - [`baseline`]: spectral SSI1 and the dense matrix oracle.
//! - [`diagnostics`]: discrete energy and per-step monitors.
//! - [`harness`]: initial conditions, refinement studies, benchmarks.
//! - [`batch`]: independent simulations run data-parallel (feature `parallel`).

// `!(x > 0.0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod baseline;
pub mod batch;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod harness;
pub mod potential;
pub mod scalar;
pub mod scheme;

pub use error::{Error, Result};
pub use grid::{Field, Grid};
pub use potential::{Nonlinearity, Potential};
pub use scheme::{SchemeConfig, SchemeKind};
