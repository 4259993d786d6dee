//! Thin CLI over the chiraltl library: each subcommand loads a TOML config,
//! delegates to the matching runner, and maps errors onto exit codes
//! (0 ok, 2 config, 3 numerical, 4 oracle mismatch).

use chiraltl::config::RunConfig;
use chiraltl::runner;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "chiraltl", version, about = "Talbot-Lau interferometry of chiral molecules")]
struct Cli {
    /// Worker threads (overrides the CHIRALTL_THREADS environment variable).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enantiomer transmission fringes S(x3) at a fixed velocity.
    Fringe { config: PathBuf },
    /// Bin-averaged enantiomer visibilities over the velocity range.
    Visibility { config: PathBuf },
    /// (rotatory strength, g_e) sweep of Delta S and Delta V_max.
    Sweep { config: PathBuf },
    /// Compare the coefficient engine against the wave-optics oracle.
    OracleCheck { config: PathBuf },
}

fn main() {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("CHIRALTL_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(n) = threads {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let result = run(&cli.command);
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cmd: &Command) -> chiraltl::Result<Vec<PathBuf>> {
    match cmd {
        Command::Fringe { config } => runner::run_fringe(&RunConfig::load(config)?),
        Command::Visibility { config } => runner::run_visibility(&RunConfig::load(config)?),
        Command::Sweep { config } => runner::run_sweep_cmd(&RunConfig::load(config)?),
        Command::OracleCheck { config } => runner::run_oracle_check(&RunConfig::load(config)?),
    }
}
