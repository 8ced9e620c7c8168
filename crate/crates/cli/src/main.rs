use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use bohr_cli::pipeline::prepare;
use bohr_cli::run::{run, Command};
use bohr_cli::Scenario;

/// Eigenvalue counting and Bohr asymptotics for Schrödinger operators on
/// cell-decomposable spaces.
#[derive(Parser)]
#[command(name = "bohr", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the scenario and `BOHR_OUT`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; overrides `BOHR_THREADS`.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Replace the top of the λ grid.
    #[arg(long, global = true)]
    lambda_max: Option<f64>,
    /// Replace the refinement level.
    #[arg(long, global = true)]
    level: Option<u32>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Dump the cell complex and its graph approximation.
    Build,
    /// Cell spectra, the decimation gate and small dense spectra.
    Spectrum,
    /// Bracketed (and direct) eigenvalue counts.
    Count,
    /// Bohr's function, ratios, error bounds and weak-Bohr ratios.
    Bohr,
    /// Heat-trace bracket.
    Trace,
    /// Distribution-function validators.
    Validate,
    /// Everything above plus gnuplot data and script.
    Report,
}

fn execute(cli: Cli) -> Result<()> {
    let path = cli.config.context("--config is required")?;
    let mut scenario = Scenario::load(&path)?;
    if let Some(l) = cli.lambda_max {
        scenario.lambda.max = l;
    }
    if let Some(m) = cli.level {
        scenario.space.level = m;
    }
    scenario.validate()?;
    let threads = match cli.threads {
        Some(n) => Some(n),
        None => std::env::var("BOHR_THREADS").ok().map(|s| s.parse()).transpose().context("BOHR_THREADS")?,
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let out = cli
        .out
        .or_else(|| std::env::var_os("BOHR_OUT").map(PathBuf::from))
        .or_else(|| scenario.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&scenario.name));
    let command = match cli.command {
        Sub::Build => Command::Build,
        Sub::Spectrum => Command::Spectrum,
        Sub::Count => Command::Count,
        Sub::Bohr => Command::Bohr,
        Sub::Trace => Command::Trace,
        Sub::Validate => Command::Validate,
        Sub::Report => Command::Report,
    };
    let prepared = prepare(&scenario)?;
    for f in run(command, &prepared, &out)? {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
