use anyhow::{bail, Result};
use clap::Args;
use saulyev::harness::{bench_per_step, BenchVariant};
use saulyev::scheme::{NonlinearSolver, SchemeKind};
use saulyev::Potential;

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Scheme tokens; append `+cardano` to use the closed-form solver.
    #[arg(long, value_delimiter = ',', default_value = "ess1,ess1-adjoint,ss2,ss2-adjoint,ssi1")]
    schemes: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "128,256,512,1024")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    steps: usize,
    #[arg(long, default_value = "poly")]
    potential: Potential,
    #[arg(long, default_value_t = 2)]
    dim: usize,
}

fn parse_variant(token: &str) -> Result<BenchVariant> {
    let (scheme, solver) = match token.split_once('+') {
        None => (token, NonlinearSolver::Newton),
        Some((scheme, solver)) => (scheme, solver.parse()?),
    };
    let scheme: SchemeKind = scheme.parse()?;
    if solver == NonlinearSolver::Cardano && scheme == SchemeKind::Ssi1 {
        bail!("ssi1 has no per-point solver");
    }
    Ok(BenchVariant { scheme, solver })
}

pub fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let variants = a
        .schemes
        .iter()
        .map(|s| parse_variant(s))
        .collect::<Result<Vec<_>>>()?;
    let result = bench_per_step(&variants, &a.sizes, &a.potential, a.dim, a.steps)?;
    print!("{}", result.to_csv());
    println!();
    print!("{}", result.exponents_csv());
    Ok(())
}
