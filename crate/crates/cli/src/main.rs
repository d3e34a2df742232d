//! `saulyev`: run Allen–Cahn simulations with the Saul'yev sweep schemes,
//! measure convergence orders, and time the per-step cost.

mod bench;
mod converge;
mod manifest;
mod run;

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "saulyev", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// March one simulation and write diagnostics, snapshots and a manifest.
    Run(run::RunArgs),
    /// Time-step or mesh refinement study; fails when the order is off.
    Converge(converge::ConvergeArgs),
    /// Per-step wall time against grid size.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kappa {
    Auto,
    Value(f64),
}

impl FromStr for Kappa {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Kappa::Auto);
        }
        match s.parse::<f64>() {
            Ok(k) if k.is_finite() && k >= 0.0 => Ok(Kappa::Value(k)),
            _ => Err(format!("expected `auto` or a non-negative number, got `{s}`")),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(a) => run::cmd_run(a),
        Command::Converge(a) => converge::cmd_converge(a),
        Command::Bench(a) => bench::cmd_bench(a).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
