use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use saulyev::grid::SnapshotMeta;
use saulyev::harness::cache::field_digest;
use saulyev::harness::{
    ic_sinesine, march, spatial_refinement, temporal_refinement, RefinementResult,
    ReferenceCache, StudySetup,
};
use saulyev::scheme::{NonlinearSolver, SchemeKind};
use saulyev::{Field, Grid, Potential};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Time,
    Space,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[arg(long)]
    mode: Mode,
    #[arg(long)]
    scheme: SchemeKind,
    #[arg(long, default_value = "poly")]
    potential: Potential,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, default_value_t = 0.25)]
    t_end: f64,
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    /// Grid points per axis (time mode).
    #[arg(long = "M", default_value_t = 128)]
    points: usize,
    /// Steps τ = 2^-k for k in [k_min, k_max] (time mode).
    #[arg(long, default_value_t = 9)]
    k_min: i32,
    #[arg(long, default_value_t = 13)]
    k_max: i32,
    /// Reference step 2^-k, integrated with ss2 (time mode).
    #[arg(long, default_value_t = 17)]
    ref_k: i32,
    /// Fixed step 2^-k (space mode).
    #[arg(long, default_value_t = 14)]
    tau_k: i32,
    /// Coarse grids (space mode).
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
    sizes: Vec<usize>,
    /// Reference grid (space mode).
    #[arg(long, default_value_t = 512)]
    fine: usize,
    /// Full-size study: t_end = 1, τ = 2^-4..2^-12 on M = 512 against a
    /// τ = 1e-6 reference in time mode, h = 2^-4..2^-9 against 2^-10 in
    /// space mode. Hours of compute.
    #[arg(long)]
    full_scale: bool,
    #[arg(long, default_value = "newton")]
    nonlinear_solver: NonlinearSolver,
    /// Run ladder cells above the step-size limit instead of skipping them.
    #[arg(long)]
    allow_unstable: bool,
    /// Allowed distance of the asymptotic order from the nominal one;
    /// defaults to 0.15 for first-order and 0.2 for second-order schemes.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Directory for cached reference solutions.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Serialize)]
struct ReferenceKey<'a> {
    purpose: &'static str,
    grid: &'a Grid,
    initial: String,
    potential: Potential,
    epsilon: f64,
    kappa: f64,
    t_end: f64,
    tau: f64,
    scheme: SchemeKind,
    solver: NonlinearSolver,
}

fn temporal(a: &ConvergeArgs, setup: &StudySetup) -> Result<RefinementResult> {
    let (points, k_min, k_max) = if a.full_scale {
        (512, 4, 12)
    } else {
        (a.points, a.k_min, a.k_max)
    };
    if k_min >= k_max {
        bail!("invalid ladder: k_min must be below k_max");
    }
    let grid = Grid::two_d(points, a.length)?;
    let u0 = ic_sinesine(&grid)?;
    let ref_tau = if a.full_scale { 1e-6 } else { 2f64.powi(-a.ref_k) };
    let taus: Vec<f64> = (k_min..=k_max).map(|k| 2f64.powi(-k)).collect();
    let compute = || -> saulyev::Result<Field> {
        let cfg = setup.config(SchemeKind::Ss2, ref_tau);
        march(&u0, cfg, &setup.potential, setup.t_end)
    };
    let reference = match &a.cache {
        Some(dir) => {
            let key = ReferenceKey {
                purpose: "temporal",
                grid: &grid,
                initial: field_digest(&u0),
                potential: setup.potential,
                epsilon: setup.epsilon,
                kappa: setup.kappa,
                t_end: setup.t_end,
                tau: ref_tau,
                scheme: SchemeKind::Ss2,
                solver: setup.solver,
            };
            let meta = SnapshotMeta {
                dim: 2,
                points,
                length: a.length,
                time: setup.t_end,
                scheme: "ss2".into(),
                potential: setup.potential.to_string(),
            };
            let (field, hit) = ReferenceCache::new(dir)?.get_or_compute(&key, &meta, compute)?;
            if hit {
                eprintln!("reference loaded from cache");
            }
            field
        }
        None => compute()?,
    };
    Ok(temporal_refinement(a.scheme, setup, &u0, &taus, &reference)?)
}

fn spatial(a: &ConvergeArgs, setup: &StudySetup) -> Result<RefinementResult> {
    let (sizes, fine) = if a.full_scale {
        (vec![16, 32, 64, 128, 256, 512], 1024)
    } else {
        (a.sizes.clone(), a.fine)
    };
    if sizes.len() < 2 {
        bail!("invalid ladder: need at least two grids");
    }
    let tau = 2f64.powi(-a.tau_k);
    let (result, _) = spatial_refinement(
        a.scheme,
        setup,
        &|g: &Grid| ic_sinesine(g),
        2,
        a.length,
        tau,
        &sizes,
        fine,
    )?;
    Ok(result)
}

/// Prints the table and returns whether the order is within tolerance.
pub fn cmd_converge(a: &ConvergeArgs) -> Result<bool> {
    if a.scheme == SchemeKind::Ssi1 {
        bail!("convergence studies cover the sweep schemes only");
    }
    let t_end = if a.full_scale { 1.0 } else { a.t_end };
    let mut setup = StudySetup::new(a.potential, a.eps, t_end);
    setup.solver = a.nonlinear_solver;
    setup.allow_unstable = a.allow_unstable;
    let (result, control, nominal) = match a.mode {
        Mode::Time => (temporal(a, &setup)?, "tau", a.scheme.order()),
        Mode::Space => (spatial(a, &setup)?, "h", 2.0),
    };
    print!("{}", result.to_csv(control));
    for s in &result.skipped {
        eprintln!("skipped {control} = {:e}: {}", s.control, s.reason);
    }
    for c in &result.unstable {
        eprintln!("{control} = {c:e} ran above the step-size limit");
    }
    let tol = a
        .tolerance
        .unwrap_or(if nominal < 1.5 { 0.15 } else { 0.2 });
    let Some(order) = result.asymptotic_order() else {
        bail!("fewer than two cells ran");
    };
    let ok = (order - nominal).abs() <= tol;
    eprintln!(
        "asymptotic order {order:.4} (nominal {nominal}, tolerance {tol}): {}",
        if ok { "ok" } else { "out of range" }
    );
    Ok(ok)
}
