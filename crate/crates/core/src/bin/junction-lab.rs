use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use junction_lab::cli::{run, Command, RunConfig, RunOptions};

#[derive(Parser)]
#[command(name = "junction-lab", version, about = "Mixed boundary value problems near a Dirichlet-Neumann junction")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Grid-doubling levels.
    #[arg(long, global = true, default_value_t = 0)]
    refine: u32,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Solve and write the field.
    Solve,
    /// Frequency curve and γ estimate.
    Frequency,
    /// Junction expansion report.
    Extract,
    /// Hardy inequalities on random mode mixtures.
    Hardy,
    /// Pohozaev residuals against radius and refinement.
    Pohozaev,
    /// Curves, ratio tables and model fit of the logarithmic example.
    Counterexample,
    /// Parameter sweep, run concurrently.
    Sweep,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Solve => Command::Solve,
            Sub::Frequency => Command::Frequency,
            Sub::Extract => Command::Extract,
            Sub::Hardy => Command::Hardy,
            Sub::Pohozaev => Command::Pohozaev,
            Sub::Counterexample => Command::Counterexample,
            Sub::Sweep => Command::Sweep,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e
                .chain()
                .find_map(|c| c.downcast_ref::<junction_lab::Error>())
                .map_or(3, |le| le.exit_code());
            ExitCode::from(code as u8)
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<Vec<PathBuf>> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => RunConfig::default(),
    };
    let opts = RunOptions::resolve(&cfg, cli.out.clone(), cli.seed, cli.refine);
    let files = run(cli.command.into(), &cfg, &opts).context("run failed")?;
    Ok(files)
}
