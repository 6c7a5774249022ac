use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gsv_cli::{parse_config, run, Mode};

/// Riemann solver, Godunov simulator and validation sweeps for the
/// generalized Saint-Venant system.
#[derive(Debug, Parser)]
#[command(name = "gsv", version)]
struct Cli {
    #[arg(value_enum)]
    mode: Mode,
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `[output] dir`, defaults to `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sweep seed; overrides `seed` in the file.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::FAILURE;
        }
    };
    let cfg = match parse_config(&text).and_then(|c| c.resolve(cli.mode)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config.display());
            return ExitCode::FAILURE;
        }
    };
    let out = cli
        .out
        .or_else(|| cfg.output.as_ref().map(|o| o.dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    match run(&cfg, &out, cli.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
