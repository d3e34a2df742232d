use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use saulyev::diagnostics::CSV_HEADER;
use saulyev::grid::{write_snapshot, SnapshotMeta};
use saulyev::harness::InitialCondition;
use saulyev::scheme::{
    max_stable_tau, NonlinearSolver, SchemeConfig, SchemeKind, Simulation, SimulationOptions,
};
use saulyev::{Field, Grid, Potential};

use crate::manifest::{GridSpec, Outputs, RunManifest, Thresholds};
use crate::Kappa;

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long, required_unless_present = "from_manifest")]
    scheme: Option<SchemeKind>,
    #[arg(long, required_unless_present = "from_manifest")]
    potential: Option<Potential>,
    /// Grid points per axis.
    #[arg(long = "M", required_unless_present = "from_manifest")]
    points: Option<usize>,
    /// Domain side length.
    #[arg(long = "L", required_unless_present = "from_manifest")]
    length: Option<f64>,
    #[arg(long, required_unless_present = "from_manifest")]
    eps: Option<f64>,
    #[arg(long, required_unless_present = "from_manifest")]
    tau: Option<f64>,
    #[arg(long, required_unless_present = "from_manifest")]
    t_end: Option<f64>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// `auto` (max |f'| on [-β, β]) or a number.
    #[arg(long, default_value = "auto")]
    kappa: Kappa,
    /// sinesine | circles | random:SEED,AMP | file:STEM
    #[arg(long, default_value = "sinesine")]
    ic: InitialCondition,
    #[arg(long, default_value = "newton")]
    nonlinear_solver: NonlinearSolver,
    /// Write a snapshot every N steps (0: none).
    #[arg(long, default_value_t = 0)]
    snapshot_every: usize,
    #[arg(long, default_value_t = 1)]
    diag_every: usize,
    /// Accept steps above the stability limit and data outside [-β, β].
    #[arg(long)]
    allow_unstable: bool,
    /// Record wall_ns as 0 so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// Keep going after a failed monitor check.
    #[arg(long)]
    lenient: bool,
    /// Take every setting from a previous run's manifest.json.
    #[arg(long, conflicts_with_all = ["scheme", "potential", "points", "length", "eps", "tau", "t_end"])]
    from_manifest: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

struct Plan {
    grid: Grid,
    config: SchemeConfig,
    potential: Potential,
    ic: InitialCondition,
    t_end: f64,
    options: SimulationOptions,
}

fn plan_from_flags(a: &RunArgs) -> Result<Plan> {
    let potential = a.potential.expect("required by clap");
    let grid = Grid::new(a.dim, a.points.expect("required"), a.length.expect("required"))?;
    let kappa = match a.kappa {
        Kappa::Auto => potential.kappa(),
        Kappa::Value(k) => k,
    };
    let mut config = SchemeConfig::new(a.scheme.expect("required"), a.tau.expect("required"), a.eps.expect("required"), kappa)
        .with_solver(a.nonlinear_solver);
    if a.allow_unstable {
        config = config.unchecked();
    }
    if a.nonlinear_solver == NonlinearSolver::Cardano && !matches!(potential.kind(), saulyev::potential::PotentialKind::Poly) {
        bail!("--nonlinear-solver cardano needs --potential poly");
    }
    if a.ic == InitialCondition::Circles && (grid.length() - 2.0 * PI).abs() > 1e-12 {
        bail!("--ic circles needs --L 6.283185307179586 (2π)");
    }
    Ok(Plan {
        grid,
        config,
        potential,
        ic: a.ic.clone(),
        t_end: a.t_end.expect("required"),
        options: SimulationOptions {
            snapshot_every: a.snapshot_every,
            diag_every: a.diag_every,
            strict: !a.lenient,
            record_timing: !a.no_timing,
        },
    })
}

fn plan_from_manifest(path: &Path) -> Result<Plan> {
    let m = RunManifest::read(path)?;
    Ok(Plan {
        grid: m.grid.grid()?,
        config: m.config,
        potential: m.potential,
        ic: m.initial_condition,
        t_end: m.t_end,
        options: m.options,
    })
}

fn snapshot_meta(plan: &Plan, time: f64) -> SnapshotMeta {
    SnapshotMeta {
        dim: plan.grid.dim(),
        points: plan.grid.points(),
        length: plan.grid.length(),
        time,
        scheme: plan.config.scheme.token().to_string(),
        potential: plan.potential.to_string(),
    }
}

pub fn cmd_run(a: &RunArgs) -> Result<bool> {
    let plan = match &a.from_manifest {
        Some(path) => plan_from_manifest(path)?,
        None => plan_from_flags(a)?,
    };
    let u0: Field = plan.ic.build(&plan.grid, plan.config.epsilon)?;

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let snap_dir = a.out.join("snapshots");
    if plan.options.snapshot_every > 0 {
        fs::create_dir_all(&snap_dir)?;
    }
    let mut snapshots = Vec::new();
    let mut sink = |field: &Field, step: usize, time: f64| -> saulyev::Result<()> {
        let name = format!("snap_{step:06}");
        write_snapshot(&snap_dir.join(&name), field, &snapshot_meta(&plan, time))?;
        snapshots.push(format!("snapshots/{name}"));
        Ok(())
    };

    let limit = max_stable_tau(
        plan.config.scheme,
        &plan.grid,
        plan.config.epsilon,
        &plan.potential,
        plan.config.kappa,
    );
    let mut sim = Simulation::new(&u0, plan.config, &plan.potential, plan.t_end, plan.options)?;
    let diag_path = a.out.join("diagnostics.csv");
    let mut diag = BufWriter::new(
        File::create(&diag_path).with_context(|| format!("creating {}", diag_path.display()))?,
    );
    writeln!(diag, "{CSV_HEADER}")?;

    let mut status = String::from("completed");
    let mut failed = false;
    let outcome = (|| -> saulyev::Result<()> {
        sim.emit_initial(Some(&mut sink))?;
        while !sim.is_finished() {
            if let Some(report) = sim.advance(Some(&mut sink))? {
                writeln!(diag, "{}", report.csv_row()).map_err(|e| saulyev::Error::InvalidInput(e.to_string()))?;
                if report.violation().is_some() {
                    failed = true;
                }
            }
        }
        Ok(())
    })();
    diag.flush()?;
    if let Err(e) = &outcome {
        status = e.to_string();
        failed = true;
        eprintln!("run stopped at step {}: {e}", sim.steps_taken());
    } else if failed {
        status = "completed with monitor violations".into();
    }

    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        grid: GridSpec {
            dim: plan.grid.dim(),
            points: plan.grid.points(),
            length: plan.grid.length(),
        },
        config: plan.config,
        potential: plan.potential,
        initial_condition: plan.ic.clone(),
        t_end: plan.t_end,
        steps: sim.total_steps(),
        options: plan.options,
        thresholds: Thresholds {
            max_stable_tau: limit.as_ref().copied().unwrap_or(f64::NAN),
            beta: plan.potential.beta(),
            kappa_required: saulyev::Nonlinearity::lipschitz(&plan.potential),
            enforced: plan.config.enforce_thresholds,
        },
        outputs: Outputs {
            diagnostics: "diagnostics.csv".into(),
            snapshots,
        },
        status,
    };
    manifest.write(&a.out)?;
    if !failed {
        eprintln!(
            "{} steps of {} to t = {}; outputs in {}",
            sim.total_steps(),
            plan.config.scheme,
            plan.t_end,
            a.out.display()
        );
    }
    Ok(!failed)
}
