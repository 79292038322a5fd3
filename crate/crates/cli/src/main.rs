use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qlandscape_cli::{experiments, CliError, Experiment, ExperimentConfig};

/// Loss-landscape experiments for variational quantum circuits.
#[derive(Debug, Parser)]
#[command(name = "qlandscape", version)]
struct Args {
    #[arg(value_enum)]
    experiment: Experiment,
    /// TOML config layered over the experiment defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override one config key, e.g. `--set optimizer.eta=0.05`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Print the resolved config and exit.
    #[arg(long)]
    print_config: bool,
}

fn run(args: &Args) -> Result<(), CliError> {
    let document = args.config.as_ref().map(std::fs::read_to_string).transpose()?;
    let config = ExperimentConfig::resolve(
        args.experiment,
        document.as_deref(),
        &args.overrides,
        args.seed,
        args.out.as_deref(),
    )?;
    if args.print_config {
        print!("{}", config.to_toml());
        return Ok(());
    }
    let (files, lines) = experiments::run(&config)?;
    for line in lines {
        println!("{line}");
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
