use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hubbard_scatter::experiment::{execute, load_config, selftest, write_outputs, ConfigError, RunError};

#[derive(Parser)]
#[command(name = "hubbard-scatter", version, about = "Wavepacket collisions on the Hubbard ring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every grid point of a config serially.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; falls back to `output` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the grid points concurrently; output matches `run`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

fn run(config: PathBuf, out: Option<PathBuf>, workers: usize) -> Result<(), RunError> {
    let cfg = load_config(&config)?;
    let dir = out
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| ConfigError::new("output", "no --out given and no output in the config"))?;
    let result = execute(&cfg, workers)?;
    write_outputs(&result, &dir)?;
    println!("{} point(s) written to {}", result.summary.rows.len(), dir.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, out } => run(config, out, 1),
        Command::Sweep { config, out, workers } => {
            if workers == 0 {
                eprintln!("error: --workers must be at least 1");
                return ExitCode::from(1);
            }
            run(config, out, workers)
        }
        Command::Selftest => {
            let checks = selftest::run_all();
            for c in &checks {
                println!("{} {}: {:.3e} (limit {:.0e})", if c.passed() { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
            }
            if checks.iter().all(|c| c.passed()) {
                return ExitCode::SUCCESS;
            }
            return ExitCode::from(2);
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
