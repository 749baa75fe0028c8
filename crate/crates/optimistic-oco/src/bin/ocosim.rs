//! Thin command-line front end: `run` executes a config-file sweep, `verify`
//! runs a named verification suite. Exit codes: 0 success, 1 runtime or
//! verification failure, 2 invalid configuration or usage.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use optimistic_oco::cli;
use optimistic_oco::error::Error;

#[derive(Parser)]
#[command(
    name = "ocosim",
    version,
    about = "optimistic online learning simulator"
)]
struct Args {
    /// Worker threads for episode-parallel runs (0 = rayon default).
    /// Affects wall time only, never results.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Master seed; every episode derives its streams from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment sweep declared in a TOML config file.
    Run {
        config: PathBuf,
        /// Output directory root (overrides the config's out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite:
    /// thm1|thm2|thm4|msmwc|dyn|lb|o2b|corrupt|rom|solvers|propb6|all.
    Verify { suite: String },
}

fn main() -> ExitCode {
    let args = Args::parse();
    cli::set_threads(args.threads);
    match args.command {
        Command::Run { config, out } => match cli::run(&config, out, args.seed.unwrap_or(0)) {
            Ok(root) => {
                println!("wrote {}", root.display());
                ExitCode::SUCCESS
            }
            Err(e @ Error::Config(_)) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Verify { suite } => match cli::verify(&suite, args.seed) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e @ Error::Config(_)) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}
