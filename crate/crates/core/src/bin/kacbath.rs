use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kacbath::harness::{defaults_toml, parse_config, run_experiment, ExperimentKind};
use kacbath::Error;

/// Overrides the worker thread count.
const THREADS_ENV: &str = "KACBATH_THREADS";

#[derive(Parser)]
#[command(
    name = "kacbath",
    version,
    about = "Kac particle system with a thermostat: simulation, steady states and metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML file.
    Run {
        config: PathBuf,
        /// Write artifacts here instead of the configured `output_dir`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Print the default document of one experiment (or of all).
    Defaults { experiment: Option<String> },
    /// Parse and validate a TOML file without running it.
    Validate { config: PathBuf },
}

fn load(path: &PathBuf) -> Result<kacbath::harness::ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::invalid(THREADS_ENV, format!("expected a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

fn execute(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Defaults { experiment } => {
            let kinds = match experiment {
                Some(name) => vec![ExperimentKind::parse(&name)?],
                None => ExperimentKind::ALL.to_vec(),
            };
            for (i, kind) in kinds.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                println!("# defaults for `{kind}`");
                print!("{}", defaults_toml(*kind));
            }
            Ok(0)
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!("{}: ok ({})", config.display(), cfg.experiment);
            Ok(0)
        }
        Command::Run { config, output_dir } => {
            configure_threads()?;
            let mut cfg = load(&config)?;
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            let report = run_experiment(&cfg)?;
            for row in &report.fits {
                match row.fit {
                    Some(f) => println!(
                        "{} (N = {}): rate {:.4} (reference {:.4}, R² {:.4}, window [{}, {}])",
                        row.quantity, row.n_particles, f.rate, row.reference_rate, f.r_squared, f.window_start, f.window_end
                    ),
                    None => println!("{} (N = {}): no fit", row.quantity, row.n_particles),
                }
            }
            for failure in &report.failures {
                eprintln!("assertion failed: {failure}");
            }
            println!("artifacts in {}", report.output_dir.display());
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
